// Writes a seeded MovieLens-shaped ratings file for trying out the cfkit
// command without a real dataset.

#include <CLI11.hpp>

#include <iostream>

#include "cfkit/error.hpp"
#include "cfkit/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic ratings file"};
  cfkit::SyntheticSpec spec;
  std::string path;
  std::string separator = "::";
  app.add_option("output", path, "Destination file")->required();
  app.add_option("--users", spec.users)->capture_default_str();
  app.add_option("--items", spec.items)->capture_default_str();
  app.add_option("--ratings", spec.ratings)->capture_default_str();
  app.add_option("--seed", spec.seed)->capture_default_str();
  app.add_option("--separator", separator)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    cfkit::write_ratings(path, cfkit::synthetic_ratings(spec), separator);
  } catch (const cfkit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
