// Analytic Renyi-2 and von Neumann Page curves next to a small Monte-Carlo run.
#include <cstdio>

#include <gbs_page/gbs_page.hpp>

int main() {
    using namespace gbs_page;
    const int n = 40;
    const double s = 0.5;
    VonNeumannCoefficients coef(s);

    std::printf("%5s %12s %12s %12s %12s\n", "r", "S2 theory", "S2 sim", "S1 theory", "S1 sim");
    for (int step = 1; step <= 9; step += 2) {
        const double r = step / 10.0;
        ExperimentPlan plan;
        plan.n = n;
        plan.k = partition_size(n, r);
        plan.squeezing = s;
        plan.alphas = {1, 2};
        plan.n_samples = 50;
        plan.master_seed = 2024;
        plan.emit_per_sample = false;
        const auto sim = run_experiment(plan).summary;

        const auto s2 = renyi2_average(n, s, r);
        const auto s1 = von_neumann_average(n, s, r, coef);
        std::printf("%5.2f %12.5f %12.5f %12.5f %12.5f\n", s2.realized_r, s2.value, sim.at(2).mean, s1.value,
                    sim.at(1).mean);
    }
}
