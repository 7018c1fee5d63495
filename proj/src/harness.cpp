#include "hoclust/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace hoclust {

int AsymptoticPoint::k() const {
    const int kk = int(std::llround(std::pow(double(n), alpha)));
    return std::clamp(kk, 1, n);
}

double AsymptoticPoint::lambda() const { return std::pow(double(n), -beta); }

double AsymptoticPoint::mu() const {
    return std::pow(double(n), -beta) * std::pow(double(k()), 0.5 * d);
}

ThresholdSet theoretical_thresholds(int d, double alpha, ThresholdProblem problem) {
    if (d < 2) throw parameter_error("theoretical_thresholds: need d >= 2");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw parameter_error("theoretical_thresholds: alpha in [0,1]");
    const double a = alpha;
    ThresholdSet t;
    switch (problem) {
        case ThresholdProblem::chc_d:
        case ThresholdProblem::chc_r:
            t.beta_s_det = std::max(d * a - 0.5 * d, 0.5 * (d - 1) * a);
            t.beta_c_det = std::max(d * a - 0.5 * d, 0.0);
            t.beta_s_rec = 0.5 * (d - 1) * a;
            t.beta_c_rec = std::max((d - 1) * a - 0.5 * (d - 1), 0.0);
            break;
        case ThresholdProblem::rohc: {
            const double bs = 0.5 * (d - 1) * a;
            const double bc = std::max(0.5 * d * a - 0.25 * d, 0.0);
            t.beta_s_det = t.beta_s_rec = bs;
            t.beta_c_det = t.beta_c_rec = bc;
            break;
        }
    }
    return t;
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw parameter_error("experiment: trials must be >= 1");
    if (d < 2) throw parameter_error("experiment: d >= 2");
    if (n < 2) throw parameter_error("experiment: n >= 2");
    if (alphas.empty() || betas.empty()) throw parameter_error("experiment: empty grid");
    if (jobs < 1) throw parameter_error("experiment: jobs >= 1");

    const bool exhaustive = algorithm == "search" || algorithm == "rohc-search" ||
                            algorithm == "scan" || algorithm == "stat";
    if (!force) {
        if (exhaustive && n > 40)
            throw parameter_error("experiment: n > 40 with an exhaustive algorithm (use force)");
        if (n > 200) throw parameter_error("experiment: n > 200 (use force)");
    }

    static const char* detect_algs[] = {"stat", "poly", "sum", "scan", "max"};
    static const char* recover_algs[] = {"search", "rohc-search", "threshold", "power", "agg-svd"};
    bool ok = false;
    if (problem == TaskKind::detect)
        for (const char* a : detect_algs) ok = ok || algorithm == a;
    else
        for (const char* a : recover_algs) ok = ok || algorithm == a;
    if (!ok) throw parameter_error("experiment: unknown algorithm '" + algorithm + "' for this problem");
}

namespace {

struct TrialOutcome {
    bool ok = false;  // detection: correct decision; recovery: exact support match
};

bool detect_once(const ExperimentConfig& cfg, const AsymptoticPoint& pt, Hypothesis h,
                 RngStream rng) {
    const std::vector<int> n(std::size_t(cfg.d), cfg.n);
    const std::vector<int> k(static_cast<std::size_t>(cfg.d), pt.k());
    DenseTensor Y;
    if (cfg.model == ModelKind::chc) {
        ChcParams p{n, k, pt.lambda()};
        Y = sample_chc(p, h, rng.derive(0)).first;
    } else {
        RohcParams p{n, k, pt.mu(), 1.5};
        Y = sample_rohc(p, h, rng.derive(0)).first;
    }

    TestOutcome out;
    if (cfg.algorithm == "sum") {
        double prod_k = std::pow(double(pt.k()), cfg.d);
        out = sum_test(Y, 0.5 * pt.lambda() * prod_k / std::sqrt(double(Y.size())));
    } else if (cfg.algorithm == "scan") {
        out = scan_test(Y, k, cfg.budget);
    } else if (cfg.algorithm == "max") {
        out = max_test(Y);
    } else if (cfg.model == ModelKind::chc) {
        out = chc_detect(Y, k, pt.lambda(), std::nullopt,
                         cfg.algorithm == "stat" ? Regime::statistical : Regime::polynomial,
                         cfg.budget);
    } else {
        out = rohc_detect(Y, k, pt.mu(), cfg.c_thresh,
                          cfg.algorithm == "stat" ? Regime::statistical : Regime::polynomial,
                          rng.derive(1), 0, cfg.budget);
    }
    return out.reject == (h == Hypothesis::planted);
}

bool recover_once(const ExperimentConfig& cfg, const AsymptoticPoint& pt, RngStream rng) {
    const std::vector<int> n(std::size_t(cfg.d), cfg.n);
    const std::vector<int> k(static_cast<std::size_t>(cfg.d), pt.k());
    DenseTensor Y;
    Support truth;
    if (cfg.model == ModelKind::chc) {
        ChcParams p{n, k, pt.lambda()};
        auto [t, s] = sample_chc(p, Hypothesis::planted, rng.derive(0));
        Y = std::move(t);
        truth = std::move(*s);
    } else {
        RohcParams p{n, k, pt.mu(), 1.5};
        auto [t, s] = sample_rohc(p, Hypothesis::planted, rng.derive(0));
        Y = std::move(t);
        truth = std::move(*s);
    }

    RecoveryResult res;
    if (cfg.algorithm == "search") {
        res = chc_search(Y, k, cfg.budget);
    } else if (cfg.algorithm == "rohc-search") {
        res = rohc_search(Y, k, pt.mu(), rng.derive(1), cfg.budget);
    } else if (cfg.algorithm == "threshold") {
        res = threshold_recover(Y);
    } else if (cfg.algorithm == "power") {
        res = power_iteration_recover(Y, cfg.model == ModelKind::chc ? ProblemKind::chc : ProblemKind::rohc,
                                      default_t_max(cfg.n), rng.derive(1));
    } else if (cfg.algorithm == "agg-svd") {
        res = aggregated_svd_recover(Y, rng.derive(1));
    } else {
        throw parameter_error("unknown recovery algorithm");
    }
    return !res.failed && res.support == truth;
}

}  // namespace

CellResult run_trials(const ExperimentConfig& cfg, double alpha, double beta,
                      std::uint64_t cell_index) {
    cfg.validate();
    AsymptoticPoint pt{alpha, beta, cfg.d, cfg.n};

    CellResult cell;
    cell.alpha = alpha;
    cell.beta = beta;
    cell.k = pt.k();
    cell.param = cfg.model == ModelKind::chc ? pt.lambda() : pt.mu();
    cell.trials = cfg.trials;

    RngStream cell_rng = RngStream(cfg.seed, 0).derive(cell_index);
    cell.seed = cell_rng.stream;

    if (cfg.problem == TaskKind::detect) {
        int correct_null = 0, correct_planted = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            RngStream trial = cell_rng.derive(std::uint64_t(t));
            try {
                if (detect_once(cfg, pt, Hypothesis::null, trial.derive(0))) ++correct_null;
            } catch (const error&) {
                // failed trial counts as an incorrect decision
            }
            try {
                if (detect_once(cfg, pt, Hypothesis::planted, trial.derive(1))) ++correct_planted;
            } catch (const error&) {
            }
        }
        const double type1 = 1.0 - double(correct_null) / cfg.trials;
        const double type2 = 1.0 - double(correct_planted) / cfg.trials;
        cell.risk = type1 + type2;
        cell.success_rate = double(correct_null + correct_planted) / (2.0 * cfg.trials);
        cell.std_err =
            std::sqrt(cell.success_rate * (1.0 - cell.success_rate) / (2.0 * cfg.trials));
    } else {
        int ok = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            RngStream trial = cell_rng.derive(std::uint64_t(t));
            try {
                if (recover_once(cfg, pt, trial)) ++ok;
            } catch (const error&) {
                // budget or degenerate failures count as recovery errors
            }
        }
        cell.success_rate = double(ok) / cfg.trials;
        cell.std_err = std::sqrt(cell.success_rate * (1.0 - cell.success_rate) / cfg.trials);
    }
    return cell;
}

PhaseDiagram phase_grid(const ExperimentConfig& cfg) {
    cfg.validate();
    PhaseDiagram D;
    D.config = cfg;
    const std::size_t na = cfg.alphas.size(), nb = cfg.betas.size();
    D.cells.resize(na * nb);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= na * nb) break;
            const double alpha = cfg.alphas[i / nb];
            const double beta = cfg.betas[i % nb];
            D.cells[i] = run_trials(cfg, alpha, beta, std::uint64_t(i));
        }
    };
    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    const ThresholdProblem tp = cfg.model == ModelKind::rohc
                                    ? ThresholdProblem::rohc
                                    : (cfg.problem == TaskKind::detect ? ThresholdProblem::chc_d
                                                                       : ThresholdProblem::chc_r);
    for (double a : cfg.alphas) {
        const ThresholdSet t = theoretical_thresholds(cfg.d, a, tp);
        OverlayRow row;
        row.alpha = a;
        if (cfg.problem == TaskKind::detect) {
            row.beta_s = t.beta_s_det;
            row.beta_c = t.beta_c_det;
        } else {
            row.beta_s = t.beta_s_rec;
            row.beta_c = t.beta_c_rec;
        }
        D.overlay.push_back(row);
    }
    return D;
}

namespace {

const char* model_name(ModelKind m) { return m == ModelKind::chc ? "chc" : "rohc"; }
const char* problem_name(TaskKind p) { return p == TaskKind::detect ? "detect" : "recover"; }

std::string fmt6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

}  // namespace

std::string diagram_to_csv(const PhaseDiagram& D) {
    std::ostringstream os;
    os << "model,problem,algorithm,d,n,alpha,beta,k,param,trials,success_rate,std_err,seed\n";
    const auto& c = D.config;
    for (const auto& cell : D.cells) {
        os << model_name(c.model) << ',' << problem_name(c.problem) << ',' << c.algorithm << ','
           << c.d << ',' << c.n << ',' << fmt6(cell.alpha) << ',' << fmt6(cell.beta) << ','
           << cell.k << ',' << fmt6(cell.param) << ',' << cell.trials << ','
           << fmt6(cell.success_rate) << ',' << fmt6(cell.std_err) << ',' << cell.seed << "\n";
    }
    for (const auto& row : D.overlay) {
        AsymptoticPoint pt{row.alpha, 0.0, c.d, c.n};
        os << model_name(c.model) << ',' << problem_name(c.problem) << ",theory:b^s," << c.d << ','
           << c.n << ',' << fmt6(row.alpha) << ',' << fmt6(row.beta_s) << ',' << pt.k() << ','
           << fmt6(0.0) << ",0," << fmt6(0.0) << ',' << fmt6(0.0) << ",0\n";
        os << model_name(c.model) << ',' << problem_name(c.problem) << ",theory:b^c," << c.d << ','
           << c.n << ',' << fmt6(row.alpha) << ',' << fmt6(row.beta_c) << ',' << pt.k() << ','
           << fmt6(0.0) << ",0," << fmt6(0.0) << ',' << fmt6(0.0) << ",0\n";
    }
    return os.str();
}

std::string config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["model"] = model_name(c.model);
    j["problem"] = problem_name(c.problem);
    j["algorithm"] = c.algorithm;
    j["d"] = c.d;
    j["n"] = c.n;
    j["alphas"] = c.alphas;
    j["betas"] = c.betas;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["c_thresh"] = c.c_thresh;
    j["budget"] = c.budget;
    j["force"] = c.force;
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    ExperimentConfig c;
    const std::string m = j.at("model").get<std::string>();
    if (m == "chc")
        c.model = ModelKind::chc;
    else if (m == "rohc")
        c.model = ModelKind::rohc;
    else
        throw parameter_error("config: model must be chc or rohc");
    const std::string p = j.at("problem").get<std::string>();
    if (p == "detect")
        c.problem = TaskKind::detect;
    else if (p == "recover")
        c.problem = TaskKind::recover;
    else
        throw parameter_error("config: problem must be detect or recover");
    c.algorithm = j.at("algorithm").get<std::string>();
    c.d = j.at("d").get<int>();
    c.n = j.at("n").get<int>();
    c.alphas = j.at("alphas").get<std::vector<double>>();
    c.betas = j.at("betas").get<std::vector<double>>();
    c.trials = j.at("trials").get<int>();
    c.seed = j.value("seed", std::uint64_t(0));
    c.jobs = j.value("jobs", 1);
    c.c_thresh = j.value("c_thresh", 1.0);
    c.budget = j.value("budget", 1e8);
    c.force = j.value("force", false);
    return c;
}

std::string diagram_to_json(const PhaseDiagram& D) {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config_to_json(D.config));
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : D.cells) {
        nlohmann::json c;
        c["alpha"] = cell.alpha;
        c["beta"] = cell.beta;
        c["k"] = cell.k;
        c["param"] = cell.param;
        c["trials"] = cell.trials;
        c["success_rate"] = cell.success_rate;
        c["risk"] = cell.risk;
        c["std_err"] = cell.std_err;
        c["seed"] = cell.seed;
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    nlohmann::json overlay = nlohmann::json::array();
    for (const auto& row : D.overlay) {
        nlohmann::json r;
        r["alpha"] = row.alpha;
        r["beta_s"] = row.beta_s;
        r["beta_c"] = row.beta_c;
        overlay.push_back(std::move(r));
    }
    j["overlay"] = std::move(overlay);
    return j.dump(2);
}

PhaseDiagram diagram_from_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    PhaseDiagram D;
    D.config = config_from_json(j.at("config").dump());
    for (const auto& c : j.at("cells")) {
        CellResult cell;
        cell.alpha = c.at("alpha").get<double>();
        cell.beta = c.at("beta").get<double>();
        cell.k = c.at("k").get<int>();
        cell.param = c.at("param").get<double>();
        cell.trials = c.at("trials").get<int>();
        cell.success_rate = c.at("success_rate").get<double>();
        cell.risk = c.value("risk", 0.0);
        cell.std_err = c.at("std_err").get<double>();
        cell.seed = c.at("seed").get<std::uint64_t>();
        D.cells.push_back(cell);
    }
    for (const auto& r : j.at("overlay")) {
        OverlayRow row;
        row.alpha = r.at("alpha").get<double>();
        row.beta_s = r.at("beta_s").get<double>();
        row.beta_c = r.at("beta_c").get<double>();
        D.overlay.push_back(row);
    }
    return D;
}

void export_diagram(const PhaseDiagram& D, const std::string& format, const std::string& path) {
    std::ofstream check;
    if (format == "csv") {
        const std::string text = diagram_to_csv(D);
        std::ofstream os(path, std::ios::binary);
        if (!os) throw io_error("cannot open for writing: " + path);
        os << text;
    } else if (format == "json") {
        const std::string text = diagram_to_json(D);
        std::ofstream os(path, std::ios::binary);
        if (!os) throw io_error("cannot open for writing: " + path);
        os << text;
    } else {
        throw parameter_error("export format must be csv or json");
    }
}

}  // namespace hoclust
