// Tracks a simulated 2-2-2 array through 30 frames and prints the estimate
// against the truth every few frames.

#include "catarray/metrics.hpp"

#include <cstdio>

using namespace catarray;

int main() {
  Scenario sc = make_scenario(ObservationMode::kGlobal, 10, 30, 7);
  const auto frames = generate_sequence(sc);
  std::vector<PointCloud> clouds;
  for (const auto& f : frames) clouds.push_back(f.cloud);

  const EstimatorSettings settings = default_settings(sc.config);
  std::mt19937_64 rng(1);
  const ParamVector prior = random_prior(sc.truth, default_prior_sigma(sc.config),
                                         settings.bounds.resolve(sc.truth), rng);
  const auto results = track_sequence(clouds, prior, settings, sc.config);

  std::printf("truth  x_o %7.2f y_o %7.2f z_o %6.2f psi %6.3f a %7.1f\n", sc.truth.x_o(),
              sc.truth.y_o(), sc.truth.z_o(), sc.truth.psi(), sc.truth.a());
  std::printf("prior  x_o %7.2f y_o %7.2f z_o %6.2f psi %6.3f a %7.1f\n", prior.x_o(), prior.y_o(),
              prior.z_o(), prior.psi(), prior.a());
  for (std::size_t t = 0; t < results.size(); t += 5) {
    const auto& p = results[t].p_hat_new;
    const auto acc = accuracy(p, sc.truth, clouds[t], sc.config);
    std::printf("t=%2zu   x_o %7.2f y_o %7.2f z_o %6.2f psi %6.3f a %7.1f  pts %3zu  acc %5.1f %%\n",
                t, p.x_o(), p.y_o(), p.z_o(), p.psi(), p.a(), clouds[t].size(),
                acc.accuracy_pct.value_or(0.0));
  }
  return 0;
}
