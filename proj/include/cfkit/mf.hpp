#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cfkit/datamodel.hpp"
#include "cfkit/random.hpp"

namespace cfkit::mf {

struct PmfParams {
  std::size_t num_factors = 10;
  double learning_rate = 0.01;
  double regularization = 0.05;
  int epochs = 50;
  std::uint64_t init_seed = 0;

  bool operator==(const PmfParams&) const = default;
};

// Latent factors for every user and item, stored row-major.
class FactorModel {
 public:
  FactorModel() = default;
  FactorModel(std::size_t num_users, std::size_t num_items,
              const PmfParams& params);

  // Fills every entry with a uniform draw from (0, 0.1], user factors first
  // (user 0 entry 0, user 0 entry 1, ...), then item factors. The
  // argument-less form draws from a generator seeded with init_seed.
  void initialize();
  void initialize(Rng& rng);

  std::span<const double> user_factors(std::size_t user) const;
  std::span<const double> item_factors(std::size_t item) const;
  std::span<double> user_factors(std::size_t user);
  std::span<double> item_factors(std::size_t item);

  // Raw dot product p_u . q_i.
  double predict(std::size_t user, std::size_t item) const;
  // predict() clamped to the rating bounds, as used for quality measures.
  double predict_clamped(std::size_t user, std::size_t item,
                         RatingBounds bounds) const {
    return bounds.clamp(predict(user, item));
  }

  std::size_t num_users() const { return num_users_; }
  std::size_t num_items() const { return num_items_; }
  std::size_t num_factors() const { return params_.num_factors; }
  const PmfParams& params() const { return params_; }

  bool operator==(const FactorModel&) const = default;

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  PmfParams params_;
  std::vector<double> user_factors_;
  std::vector<double> item_factors_;
};

double dot(std::span<const double> p, std::span<const double> q);

// One SGD update on a single rating, both vectors updated from their
// pre-update values.
void sgd_step(std::span<double> p, std::span<double> q, double rating,
              double learning_rate, double regularization);

// Gradient of (r - p.q)^2 + lambda (|p|^2 + |q|^2) with respect to p and q.
// sgd_step moves against half of it, scaled by the learning rate.
void rating_loss_gradient(std::span<const double> p, std::span<const double> q,
                          double rating, double regularization,
                          std::span<double> grad_p, std::span<double> grad_q);

double rating_loss(std::span<const double> p, std::span<const double> q,
                   double rating, double regularization);

// Regularized squared error over all training ratings.
double objective(const RatingsModel& model, const FactorModel& factors);

using EpochCallback = std::function<void(int epoch, const FactorModel&)>;

// Trains by SGD over the training ratings, visiting them in a freshly
// shuffled order each epoch. Throws TrainingDivergedError as soon as an
// epoch leaves a non-finite factor.
FactorModel train_pmf(const RatingsModel& model, const PmfParams& params,
                      const EpochCallback& on_epoch = {});

// Writes clamped predictions for every test user's test ratings into its
// PREDICTIONS store entry.
void predictions_pass(RatingsModel& model, const FactorModel& factors,
                      std::size_t workers);

}  // namespace cfkit::mf
