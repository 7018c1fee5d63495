#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hoclust/detection.hpp"
#include "hoclust/models.hpp"
#include "hoclust/recovery.hpp"

namespace hoclust {

// One (alpha, beta) point of the asymptotic regime: k = round(n^alpha)
// clamped to [1, n], lambda = n^-beta, mu = n^-beta * k^{d/2} (polylog
// factors dropped).
struct AsymptoticPoint {
    double alpha = 0.0;
    double beta = 0.0;
    int d = 3;
    int n = 0;

    [[nodiscard]] int k() const;
    [[nodiscard]] double lambda() const;
    [[nodiscard]] double mu() const;
};

struct ThresholdSet {
    double beta_s_det = 0.0;
    double beta_c_det = 0.0;
    double beta_s_rec = 0.0;
    double beta_c_rec = 0.0;
};

enum class ThresholdProblem { chc_d, chc_r, rohc };

// Phase-transition exponents: CHC
//   beta^s_det = (d a - d/2) v (d-1)a/2,  beta^c_det = (d a - d/2) v 0,
//   beta^s_rec = (d-1)a/2,                beta^c_rec = ((d-1)a - (d-1)/2) v 0;
// ROHC: beta^s = (d-1)a/2, beta^c = (a d/2 - d/4) v 0 (det = rec).
ThresholdSet theoretical_thresholds(int d, double alpha, ThresholdProblem problem);

enum class ModelKind { chc, rohc };
enum class TaskKind { detect, recover };

struct ExperimentConfig {
    ModelKind model = ModelKind::chc;
    TaskKind problem = TaskKind::recover;
    std::string algorithm;  // detect: stat|poly|sum|scan|max; recover: search|rohc-search|threshold|power|agg-svd
    int d = 3;
    int n = 20;
    std::vector<double> alphas;
    std::vector<double> betas;
    int trials = 50;
    std::uint64_t seed = 0;
    int jobs = 1;
    double c_thresh = 1.0;       // ROHC detection constant
    double budget = 1e8;         // enumeration guard
    bool force = false;          // lift the desk-scale size guardrails
    void validate() const;
};

struct CellResult {
    double alpha = 0.0;
    double beta = 0.0;
    int k = 0;
    double param = 0.0;  // lambda or mu actually used
    int trials = 0;
    double success_rate = 0.0;  // detection: fraction of correct decisions; recovery: exact-match rate
    double risk = 0.0;          // detection only: empirical Type-I + Type-II, in [0, 2]
    double std_err = 0.0;
    std::uint64_t seed = 0;  // derived stream id for the cell
};

struct OverlayRow {
    double alpha = 0.0;
    double beta_s = 0.0;
    double beta_c = 0.0;
};

struct PhaseDiagram {
    ExperimentConfig config;
    std::vector<CellResult> cells;      // row-major over (alpha, beta)
    std::vector<OverlayRow> overlay;    // one row per alpha
};

// Runs one grid cell: balanced null/planted detection trials or planted
// recovery trials. Per-trial failures (budget errors, no marked tuple)
// count as errors, never abort the cell.
CellResult run_trials(const ExperimentConfig& config, double alpha, double beta,
                      std::uint64_t cell_index);

PhaseDiagram phase_grid(const ExperimentConfig& config);

// CSV columns: model,problem,algorithm,d,n,alpha,beta,k,param,trials,
// success_rate,std_err,seed. Overlay rows carry algorithm "theory:b^s" /
// "theory:b^c" with the threshold value in the beta column. Rates use 6
// decimal places.
std::string diagram_to_csv(const PhaseDiagram& D);
std::string diagram_to_json(const PhaseDiagram& D);
PhaseDiagram diagram_from_json(const std::string& json_text);
void export_diagram(const PhaseDiagram& D, const std::string& format, const std::string& path);

ExperimentConfig config_from_json(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);

}  // namespace hoclust
