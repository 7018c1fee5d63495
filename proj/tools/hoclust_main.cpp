// Command-line harness: generate instances, run detection/recovery, apply
// graph-to-tensor reductions, drive the clique chain, and sweep phase grids.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hoclust/detection.hpp"
#include "hoclust/harness.hpp"
#include "hoclust/io.hpp"
#include "hoclust/metropolis.hpp"
#include "hoclust/recovery.hpp"
#include "hoclust/reductions.hpp"

using namespace hoclust;
using nlohmann::json;

namespace {

json outcome_to_json(const TestOutcome& o) {
    json j;
    j["reject"] = o.reject;
    j["statistic"] = o.statistic;
    j["threshold"] = o.threshold;
    if (!o.note.empty()) j["note"] = o.note;
    if (!o.components.empty()) {
        json comps;
        for (const auto& [name, c] : o.components) comps[name] = outcome_to_json(c);
        j["components"] = std::move(comps);
    }
    return j;
}

json support_to_json(const Support& s) {
    json arr = json::array();
    for (const auto& set : s.sets) {
        json one = json::array();
        for (int v : set) one.push_back(v + 1);
        arr.push_back(std::move(one));
    }
    return arr;
}

Support support_from_json(const json& arr) {
    Support s;
    for (const auto& set : arr) {
        std::vector<int> one;
        for (const auto& v : set) one.push_back(v.get<int>() - 1);
        s.sets.push_back(std::move(one));
    }
    return s;
}

json recovery_to_json(const RecoveryResult& r) {
    json j;
    j["failed"] = r.failed;
    if (r.failed) j["failure_reason"] = r.failure_reason;
    j["support"] = support_to_json(r.support);
    json diag;
    for (const auto& [k, v] : r.diagnostics) diag[k] = v;
    j["diagnostics"] = std::move(diag);
    return j;
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_file(out_path, text);
}

std::vector<int> expand_dims(const std::vector<int>& n, int d) {
    if (int(n.size()) == d) return n;
    if (n.size() == 1) return std::vector<int>(std::size_t(d), n[0]);
    throw parameter_error("expected 1 or d dimension values");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"high-order clustering experiments"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;

    // ---- gen ----------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "sample a model instance or a hypergraph");
    std::string gen_model = "chc";
    std::vector<int> gen_n{8};
    std::vector<int> gen_k{2};
    int gen_d = 3, gen_N = 20, gen_kappa = 5;
    double gen_lambda = 1.0, gen_mu = 1.0, gen_q = 0.5, gen_q1 = 1.0, gen_q2 = 0.5;
    std::string gen_hypothesis = "planted";
    std::string gen_out = "instance";
    gen->add_option("--model", gen_model, "chc|rohc|er|hpc|hpds")->required();
    gen->add_option("--n", gen_n, "tensor dims (one value or d values)");
    gen->add_option("--k", gen_k, "cluster sizes (one value or d values)");
    gen->add_option("--d", gen_d, "order");
    gen->add_option("--N", gen_N, "vertex count (graphs)");
    gen->add_option("--kappa", gen_kappa, "clique/community size");
    gen->add_option("--lambda", gen_lambda, "CHC signal strength");
    gen->add_option("--mu", gen_mu, "ROHC signal strength");
    gen->add_option("--q", gen_q, "er edge probability");
    gen->add_option("--q1", gen_q1, "hpds inside probability");
    gen->add_option("--q2", gen_q2, "hpds outside probability");
    gen->add_option("--hypothesis", gen_hypothesis, "null|planted");
    gen->add_option("--out", gen_out, "output prefix");
    gen->add_option("--seed", seed, "rng seed");

    // ---- detect -------------------------------------------------------
    auto* det = app.add_subcommand("detect", "run a hypothesis test on a tensor");
    std::string det_model = "chc", det_regime = "poly", det_in, det_out;
    std::vector<int> det_k{2};
    double det_lambda = 0.0, det_mu = 0.0, det_c = 1.0;
    double det_W_value = 0.0;
    bool det_W_set = false;
    double det_budget = 1e8;
    det->add_option("--model", det_model, "chc|rohc")->required();
    det->add_option("--regime", det_regime, "stat|poly");
    det->add_option("--in", det_in, "input .ten file")->required();
    det->add_option("--k", det_k, "sparsity (one value or d values)");
    det->add_option("--lambda", det_lambda, "CHC signal strength");
    det->add_option("--mu", det_mu, "ROHC signal strength");
    auto* det_W_opt =
        det->add_option("--W", det_W_value,
                        "sum-test threshold (default: lambda/2 rule, or sqrt(2 log log prod n) "
                        "when lambda = 0)");
    det->add_option("--c-thresh", det_c, "ROHC singular-statistic constant");
    det->add_option("--budget", det_budget, "enumeration budget");
    det->add_option("--seed", seed, "rng seed");
    det->add_option("--out", det_out, "write the outcome JSON here (default stdout)");

    // ---- recover ------------------------------------------------------
    auto* rec = app.add_subcommand("recover", "recover a planted support from a tensor");
    std::string rec_alg = "threshold", rec_in, rec_truth, rec_out, rec_problem = "chc";
    std::vector<int> rec_k{2};
    double rec_mu = 0.0, rec_budget = 1e8;
    int rec_tmax = 0;
    rec->add_option("--alg", rec_alg, "search|rohc-search|threshold|power|agg-svd")->required();
    rec->add_option("--in", rec_in, "input .ten file")->required();
    rec->add_option("--k", rec_k, "sparsity (one value or d values)");
    rec->add_option("--mu", rec_mu, "ROHC signal strength (rohc-search marking)");
    rec->add_option("--problem", rec_problem, "chc|rohc (power iteration branch)");
    rec->add_option("--t-max", rec_tmax, "power iteration rounds (default ceil(5 log n))");
    rec->add_option("--budget", rec_budget, "enumeration budget");
    rec->add_option("--truth", rec_truth, "truth sidecar JSON; exit 1 on mismatch");
    rec->add_option("--seed", seed, "rng seed");
    rec->add_option("--out", rec_out, "write the result JSON here (default stdout)");

    // ---- reduce -------------------------------------------------------
    auto* red = app.add_subcommand("reduce", "map a hypergraph to a clustering instance");
    std::string red_map, red_in, red_out = "reduced";
    int red_ell = 1, red_ntarget = 0;
    double red_rho = 0.25;
    bool red_pad = false;
    red->add_option("--map", red_map, "hpc-rohc|hpc-chc|hpds-chc")->required();
    red->add_option("--in", red_in, "input graph JSON")->required();
    red->add_option("--ell", red_ell, "cloning / averaging rounds");
    red->add_option("--n-target", red_ntarget, "target side length (hpc-chc)");
    red->add_option("--rho", red_rho, "density bias (hpds-chc)");
    red->add_flag("--pad", red_pad, "pad odd instances before cloning");
    red->add_option("--seed", seed, "rng seed");
    red->add_option("--out", red_out, "output prefix");

    // ---- mcmc ---------------------------------------------------------
    auto* mc = app.add_subcommand("mcmc", "Metropolis clique chains on a hypergraph");
    std::string mc_in, mc_out;
    double mc_fugacity = 1.5;
    int mc_target = 3, mc_chains = 1;
    std::int64_t mc_steps = 100000;
    std::vector<int> mc_init;
    mc->add_option("--in", mc_in, "input graph JSON")->required();
    mc->add_option("--fugacity", mc_fugacity, "chain fugacity (>= 1)");
    mc->add_option("--target", mc_target, "target clique size");
    mc->add_option("--max-steps", mc_steps, "step cap per chain");
    mc->add_option("--chains", mc_chains, "number of independent chains");
    mc->add_option("--init", mc_init, "initial clique (1-based vertex ids)");
    mc->add_option("--seed", seed, "rng seed");
    mc->add_option("--out", mc_out, "write the records JSON here (default stdout)");

    // ---- phase --------------------------------------------------------
    auto* ph = app.add_subcommand("phase", "Monte-Carlo phase diagram sweep");
    std::string ph_config, ph_out = "diagram.csv", ph_json;
    int ph_jobs = 0;
    std::uint64_t ph_seed = 0;
    bool ph_seed_set = false;
    ph->add_option("--config", ph_config, "experiment config JSON")->required();
    ph->add_option("--out", ph_out, "output CSV path");
    ph->add_option("--json", ph_json, "also write the diagram JSON here");
    ph->add_option("--jobs", ph_jobs, "worker threads (default from config)");
    auto* ph_seed_opt = ph->add_option("--seed", ph_seed, "override the config seed");

    CLI11_PARSE(app, argc, argv);
    det_W_set = det_W_opt->count() > 0;
    ph_seed_set = ph_seed_opt->count() > 0;

    try {
        if (*gen) {
            RngStream rng(seed, 0);
            if (gen_model == "chc" || gen_model == "rohc") {
                const int d = int(gen_n.size()) > 1 ? int(gen_n.size()) : gen_d;
                const auto dims = expand_dims(gen_n, d);
                const auto ks = expand_dims(gen_k, d);
                const Hypothesis h = gen_hypothesis == "null" ? Hypothesis::null : Hypothesis::planted;
                DenseTensor Y;
                std::optional<Support> sup;
                json params;
                if (gen_model == "chc") {
                    ChcParams p{dims, ks, gen_lambda};
                    auto r = sample_chc(p, h, rng);
                    Y = std::move(r.first);
                    sup = std::move(r.second);
                    params["lambda"] = gen_lambda;
                } else {
                    RohcParams p{dims, ks, gen_mu, 1.5};
                    auto r = sample_rohc(p, h, rng);
                    Y = std::move(r.first);
                    sup = std::move(r.second);
                    params["mu"] = gen_mu;
                }
                params["model"] = gen_model;
                params["hypothesis"] = gen_hypothesis;
                params["n"] = dims;
                params["k"] = ks;
                params["seed"] = seed;
                write_tensor(Y, gen_out + ".ten");
                json side;
                side["params"] = std::move(params);
                side["support"] = sup ? support_to_json(*sup) : json(nullptr);
                write_file(gen_out + ".json", side.dump(2) + "\n");
            } else {
                GraphParams gp;
                if (gen_model == "er") {
                    gp.kind = GraphKind::erdos_renyi;
                    gp.q = gen_q;
                } else if (gen_model == "hpc") {
                    gp.kind = GraphKind::planted_clique;
                    gp.kappa = gen_kappa;
                } else if (gen_model == "hpds") {
                    gp.kind = GraphKind::planted_dense_subgraph;
                    gp.kappa = gen_kappa;
                    gp.q1 = gen_q1;
                    gp.q2 = gen_q2;
                } else {
                    throw parameter_error("unknown model: " + gen_model);
                }
                auto G = sample_hypergraph(gp, gen_N, gen_d, rng);
                write_hypergraph(G, gen_out + ".json");
            }
            return 0;
        }

        if (*det) {
            auto Y = read_tensor(det_in);
            const auto ks = expand_dims(det_k, Y.order());
            const Regime regime = det_regime == "stat" ? Regime::statistical : Regime::polynomial;
            TestOutcome out;
            if (det_model == "chc") {
                std::optional<double> W;
                if (det_W_set)
                    W = det_W_value;
                else if (det_lambda == 0.0)
                    W = default_unknown_W(Y.dims);
                out = chc_detect(Y, ks, det_lambda, W, regime, det_budget);
            } else if (det_model == "rohc") {
                out = rohc_detect(Y, ks, det_mu, det_c, regime, RngStream(seed, 1), 0, det_budget);
            } else {
                throw parameter_error("unknown model: " + det_model);
            }
            emit(outcome_to_json(out), det_out);
            return 0;
        }

        if (*rec) {
            auto Y = read_tensor(rec_in);
            const auto ks = expand_dims(rec_k, Y.order());
            RngStream rng(seed, 2);
            RecoveryResult res;
            if (rec_alg == "search") {
                res = chc_search(Y, ks, rec_budget);
            } else if (rec_alg == "rohc-search") {
                res = rohc_search(Y, ks, rec_mu, rng, rec_budget);
            } else if (rec_alg == "threshold") {
                res = threshold_recover(Y);
            } else if (rec_alg == "power") {
                const int n_max = *std::max_element(Y.dims.begin(), Y.dims.end());
                res = power_iteration_recover(
                    Y, rec_problem == "rohc" ? ProblemKind::rohc : ProblemKind::chc,
                    rec_tmax > 0 ? rec_tmax : default_t_max(n_max), rng);
            } else if (rec_alg == "agg-svd") {
                res = aggregated_svd_recover(Y, rng);
            } else {
                throw parameter_error("unknown algorithm: " + rec_alg);
            }
            emit(recovery_to_json(res), rec_out);
            if (!rec_truth.empty()) {
                auto side = json::parse(read_file(rec_truth));
                if (side.contains("support") && !side.at("support").is_null()) {
                    Support truth = support_from_json(side.at("support"));
                    return (!res.failed && res.support == truth) ? 0 : 1;
                }
            }
            return 0;
        }

        if (*red) {
            auto G = read_hypergraph(red_in);
            RngStream rng(seed, 3);
            ReductionReport rep;
            if (red_map == "hpc-rohc") {
                rep = hpc_to_rohc(G, red_ell, rng, red_pad);
            } else if (red_map == "hpc-chc") {
                if (red_ntarget <= 0) {
                    if (G.N % (G.d * red_ell) != 0)
                        throw parameter_error("hpc-chc: N must equal d * n * ell");
                    red_ntarget = G.N / (G.d * red_ell);
                }
                rep = hpc_to_chc_detection(G, red_ntarget, red_ell, rng);
            } else if (red_map == "hpds-chc") {
                rep = hpds_to_chc(G, red_rho, rng);
            } else {
                throw parameter_error("unknown map: " + red_map);
            }
            write_tensor(rep.output, red_out + ".ten");
            json j;
            j["map"] = rep.map_name;
            j["xi"] = rep.xi;
            j["ell"] = rep.ell;
            j["implied_signal"] = rep.implied_signal;
            j["implied_k"] = rep.implied_k;
            j["graph_hash"] = rep.graph_hash;
            j["seed"] = seed;
            write_file(red_out + ".report.json", j.dump(2) + "\n");
            return 0;
        }

        if (*mc) {
            auto G = read_hypergraph(mc_in);
            ChainConfig cfg{mc_fugacity, mc_steps, mc_target};
            CliqueState init;
            for (int v : mc_init) init.vertices.push_back(v - 1);
            std::sort(init.vertices.begin(), init.vertices.end());
            json records = json::array();
            for (int c = 0; c < mc_chains; ++c) {
                auto recrd = run_chain(G, cfg, init, RngStream(seed, 4).derive(std::uint64_t(c)));
                json j;
                j["hit"] = recrd.hit;
                j["steps"] = recrd.steps;
                j["max_size"] = recrd.max_size;
                j["final_size"] = recrd.final_size;
                records.push_back(std::move(j));
            }
            emit(records, mc_out);
            return 0;
        }

        if (*ph) {
            auto cfg = config_from_json(read_file(ph_config));
            if (ph_jobs > 0) cfg.jobs = ph_jobs;
            if (ph_seed_set) cfg.seed = ph_seed;
            auto D = phase_grid(cfg);
            export_diagram(D, "csv", ph_out);
            if (!ph_json.empty()) export_diagram(D, "json", ph_json);
            return 0;
        }
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
