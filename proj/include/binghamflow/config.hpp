#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "binghamflow/assembly.hpp"
#include "binghamflow/huber.hpp"

namespace bingham {

enum class Theta0Mode { Elliptic, Constant };

struct RunConfig {
    int mesh_nx = 24;
    int mesh_ny = 24;
    double x_extent = 1.0;
    double y_extent = 1.0;

    PhysicalParams physical;
    RegularizationParams reg;

    double dt_constant = 0.1;  // C in dt = C * h^(4/5)
    double Tf = 0.12;

    Theta0Mode theta0_mode = Theta0Mode::Elliptic;
    double theta0_value = 0.0;  // used when theta0_mode == Constant

    int snapshot_every = 0;  // 0 = automatic cadence (about 10 per run)
    std::string output_dir = "out";
    double report_q = 1.5;
    std::vector<double> sample_times;  // empty = {Tf/8, Tf/4, Tf/2, Tf}

    void validate() const;
    std::vector<double> resolved_sample_times() const;
};

RunConfig preset_experiment1();
RunConfig preset_experiment2();

// "key = value" lines, '#' comments, unknown keys rejected.  A
// "preset = experiment1|experiment2" line loads that preset as the base;
// later lines override individual keys.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical echo of every resolved key; re-parsing it reproduces the config.
// Derived quantities (h, dt, n_steps) are included as comments.
void echo_config(const RunConfig& cfg, double h, double dt, int n_steps,
                 std::ostream& os);

}  // namespace bingham
