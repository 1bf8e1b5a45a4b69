#include "cfkit/mf.hpp"

#include <cmath>
#include <utility>

#include "cfkit/engine.hpp"
#include "cfkit/error.hpp"
#include "cfkit/pipeline.hpp"

namespace cfkit::mf {
namespace {

struct TrainingRating {
  std::uint32_t user;
  std::uint32_t item;
  double value;
};

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void validate(const PmfParams& params) {
  if (params.num_factors < 1) throw ArgumentError("factors must be >= 1");
  if (!(params.learning_rate > 0.0)) {
    throw ArgumentError("learning rate must be > 0");
  }
  if (!(params.regularization >= 0.0)) {
    throw ArgumentError("regularization must be >= 0");
  }
  if (params.epochs < 1) throw ArgumentError("epochs must be >= 1");
}

}  // namespace

FactorModel::FactorModel(std::size_t num_users, std::size_t num_items,
                         const PmfParams& params)
    : num_users_(num_users),
      num_items_(num_items),
      params_(params),
      user_factors_(num_users * params.num_factors, 0.0),
      item_factors_(num_items * params.num_factors, 0.0) {}

void FactorModel::initialize() {
  Rng rng(params_.init_seed);
  initialize(rng);
}

void FactorModel::initialize(Rng& rng) {
  // 0.1 * (1 - u) maps [0, 1) onto (0, 0.1].
  for (double& x : user_factors_) x = 0.1 * (1.0 - rng.unit());
  for (double& x : item_factors_) x = 0.1 * (1.0 - rng.unit());
}

std::span<const double> FactorModel::user_factors(std::size_t user) const {
  if (user >= num_users_) {
    throw BoundsError("user " + std::to_string(user) + " out of range");
  }
  return {user_factors_.data() + user * params_.num_factors,
          params_.num_factors};
}

std::span<const double> FactorModel::item_factors(std::size_t item) const {
  if (item >= num_items_) {
    throw BoundsError("item " + std::to_string(item) + " out of range");
  }
  return {item_factors_.data() + item * params_.num_factors,
          params_.num_factors};
}

std::span<double> FactorModel::user_factors(std::size_t user) {
  auto view = std::as_const(*this).user_factors(user);
  return {const_cast<double*>(view.data()), view.size()};
}

std::span<double> FactorModel::item_factors(std::size_t item) {
  auto view = std::as_const(*this).item_factors(item);
  return {const_cast<double*>(view.data()), view.size()};
}

double FactorModel::predict(std::size_t user, std::size_t item) const {
  return dot(user_factors(user), item_factors(item));
}

double dot(std::span<const double> p, std::span<const double> q) {
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) sum += p[k] * q[k];
  return sum;
}

void sgd_step(std::span<double> p, std::span<double> q, double rating,
              double learning_rate, double regularization) {
  const double error = rating - dot(p, q);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double pk = p[k];
    const double qk = q[k];
    p[k] = pk + learning_rate * (error * qk - regularization * pk);
    q[k] = qk + learning_rate * (error * pk - regularization * qk);
  }
}

void rating_loss_gradient(std::span<const double> p, std::span<const double> q,
                          double rating, double regularization,
                          std::span<double> grad_p, std::span<double> grad_q) {
  const double error = rating - dot(p, q);
  for (std::size_t k = 0; k < p.size(); ++k) {
    grad_p[k] = -2.0 * error * q[k] + 2.0 * regularization * p[k];
    grad_q[k] = -2.0 * error * p[k] + 2.0 * regularization * q[k];
  }
}

double rating_loss(std::span<const double> p, std::span<const double> q,
                   double rating, double regularization) {
  const double error = rating - dot(p, q);
  return error * error + regularization * (dot(p, p) + dot(q, q));
}

double objective(const RatingsModel& model, const FactorModel& factors) {
  double loss = 0.0;
  for (const auto& user : model.users) {
    const auto p = factors.user_factors(user.index);
    for (const auto& r : user.ratings) {
      const double e = r.value - dot(p, factors.item_factors(r.index));
      loss += e * e;
    }
  }
  double norms = 0.0;
  for (std::size_t u = 0; u < factors.num_users(); ++u) {
    const auto p = factors.user_factors(u);
    norms += dot(p, p);
  }
  for (std::size_t i = 0; i < factors.num_items(); ++i) {
    const auto q = factors.item_factors(i);
    norms += dot(q, q);
  }
  return loss + factors.params().regularization * norms;
}

FactorModel train_pmf(const RatingsModel& model, const PmfParams& params,
                      const EpochCallback& on_epoch) {
  validate(params);
  FactorModel factors(model.users.size(), model.items.size(), params);
  Rng rng(params.init_seed);
  factors.initialize(rng);

  std::vector<TrainingRating> ratings;
  ratings.reserve(model.num_ratings);
  for (const auto& user : model.users) {
    for (const auto& r : user.ratings) {
      ratings.push_back(
          {static_cast<std::uint32_t>(user.index), r.index, r.value});
    }
  }

  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    rng.shuffle(std::span<TrainingRating>(ratings));
    for (const auto& r : ratings) {
      sgd_step(factors.user_factors(r.user), factors.item_factors(r.item),
               r.value, params.learning_rate, params.regularization);
    }
    for (std::size_t u = 0; u < factors.num_users(); ++u) {
      if (!all_finite(factors.user_factors(u))) {
        throw TrainingDivergedError(epoch, params.learning_rate);
      }
    }
    for (std::size_t i = 0; i < factors.num_items(); ++i) {
      if (!all_finite(factors.item_factors(i))) {
        throw TrainingDivergedError(epoch, params.learning_rate);
      }
    }
    if (on_epoch) on_epoch(epoch, factors);
  }
  return factors;
}

void predictions_pass(RatingsModel& model, const FactorModel& factors,
                      std::size_t workers) {
  if (factors.num_users() != model.users.size() ||
      factors.num_items() != model.items.size()) {
    throw ArgumentError("factor model does not match the ratings model");
  }
  ElementPass pass;
  pass.per_element = [&factors](RatingsModel& m, std::size_t t) {
    TestProfile& tu = m.test_users[t];
    PredictionVector pv;
    pv.owner = t;
    pv.values.reserve(tu.test_ratings.size());
    for (const auto& tr : tu.test_ratings) {
      const std::size_t item = m.test_items[tr.index].index;
      pv.values.push_back(factors.predict_clamped(tu.index, item, m.bounds));
    }
    tu.store.put(kPredictionsKey, std::move(pv));
  };
  run_pass(model, PassTarget::kTestUsers, pass, workers);
}

}  // namespace cfkit::mf
