#include <chrono>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "support/criteria.hpp"

namespace {

struct Criterion {
    const char* title;
    std::function<criteria::Verdict()> check;
};

const Criterion kCriteria[] = {
    {"oracle optimality on tiny instances", [] { return criteria::optimality(); }},
    {"mandatory allocation on the two-route example", [] { return criteria::two_route_reproduction(); }},
    {"neighbourhood exhaustiveness", [] { return criteria::neighbourhoods(); }},
    {"subtour cut soundness and progress", [] { return criteria::sec_soundness(); }},
    {"feasibility discipline", [] { return criteria::feasibility_discipline(); }},
    {"determinism", [] { return criteria::determinism(); }},
    {"parallel sanity", [] { return criteria::parallel_sanity(); }},
    {"generator quotas", [] { return criteria::generator_quotas(); }},
    {"classical-instance regression", [] { return criteria::top_regression(); }},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks; prints one PASS/FAIL line per criterion"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-9); all when omitted")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    for (int i = 1; i <= 9; ++i) {
        if (only && i != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        criteria::Verdict v;
        try {
            v = kCriteria[i - 1].check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = criteria::seconds_since(t0);
        std::cout << "criterion " << i << " [" << kCriteria[i - 1].title << "]: " << (v.pass ? "PASS" : "FAIL") << " - "
                  << v.detail << " (" << secs << " s)" << std::endl;
        all_pass = all_pass && v.pass;
    }
    return all_pass ? 0 : 1;
}
