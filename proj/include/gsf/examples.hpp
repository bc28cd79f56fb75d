#pragma once

// The six scripted examples on local inversion: Heaviside, delta o delta,
// r x, sin(x / r), r sin x and x^3, each asserting its expected outcome as
// verdicts and exponents.

#include "gsf/config.hpp"
#include "gsf/report.hpp"

namespace gsf {

constexpr int kExampleCount = 6;

/// Runs example `id` (1..6). Library errors are recorded in the report.
Report run_example(int id, const Config& config);
/// All examples in one report; check names are prefixed by the example id.
Report run_all_examples(const Config& config);

}  // namespace gsf
