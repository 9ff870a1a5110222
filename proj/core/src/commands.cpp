#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <random>
#include <variant>

#include "json.hpp"

#include "ospectra/cli.hpp"
#include "ospectra/errors.hpp"
#include "ospectra/validate.hpp"

namespace ospectra {

namespace {

using json = nlohmann::ordered_json;

json config_json(const RunConfig& cfg) { return json::parse(emit_config(cfg)); }

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json pair_json(const Eigenpair& e) {
    json j;
    j["i"] = e.level;
    j["k"] = e.dim;
    j["lambda"] = e.lambda;
    j["c_value"] = e.c_value;
    j["minimax_value"] = e.minimax_value;
    j["modular"] = e.modular;
    j["residual"] = e.residual;
    j["iterations"] = e.iterations;
    j["coefficients"] = to_vector(sign_normalized(e.u));
    return j;
}

json error_json(int i, int k, const std::exception& ex) {
    json j;
    j["i"] = i;
    j["k"] = k;
    j["error"] = ex.what();
    if (const auto* ce = dynamic_cast<const ConvergenceError*>(&ex)) {
        j["lambda"] = ce->lambda();
        j["residual"] = ce->residual();
        j["iterations"] = ce->iterations();
    }
    return j;
}

// Solves one level; numerical failures are returned as an error record.
std::variant<Eigenpair, json> solve_one(const AssembledProblem& prob, int i, const SolverConfig& cfg) {
    try {
        return solve_level(prob, i, cfg);
    } catch (const LevelError& e) {
        return error_json(i, prob.dim(), e);
    } catch (const ConvergenceError& e) {
        return error_json(i, prob.dim(), e);
    }
}

std::string companion_path(const std::string& csv) {
    std::filesystem::path p(csv);
    p.replace_extension(".summary.json");
    return p.string();
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SubTest tally(const std::string& name) {
    SubTest t;
    t.name = name;
    return t;
}

void record(SubTest& t, double margin) {
    ++t.trials;
    if (!(margin >= 0.0)) ++t.failures;
    if (std::isnan(margin)) margin = -INFINITY;
    t.worst_margin = t.trials == 1 ? margin : std::min(t.worst_margin, margin);
}

json subtest_json(const SubTest& t) {
    json j;
    j["name"] = t.name;
    j["trials"] = t.trials;
    j["failures"] = t.failures;
    j["worst_margin"] = t.worst_margin;
    return j;
}

template <class F>
int guarded(const RunConfig& cfg, std::ostream& log, const char* task, F&& body) {
    try {
        cfg.validate();
        if (cfg.task != task) throw ConfigError(std::string("task: expected \"") + task + "\"");
        return body();
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InputError& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
    return guarded(cfg, log, "solve", [&] {
        const AssembledProblem prob = make_problem(cfg, cfg.mesh.k, cfg.s);
        json levels = json::array();
        bool ok = true;
        for (int i : cfg.levels) {
            auto r = solve_one(prob, i, cfg.solver);
            if (auto* e = std::get_if<Eigenpair>(&r)) {
                log << "level " << i << ": lambda = " << num(e->lambda) << ", residual = " << num(e->residual) << "\n";
                levels.push_back(pair_json(*e));
            } else {
                const json& err = std::get<json>(r);
                log << "level " << i << ": " << err["error"].get<std::string>() << "\n";
                levels.push_back(err);
                ok = false;
            }
        }
        json out;
        out["schema"] = kSchema;
        out["task"] = "solve";
        out["inputs"] = config_json(cfg);
        out["status"] = ok ? "converged" : "failed";
        out["levels"] = std::move(levels);
        write_atomic(cfg.output, out.dump(2) + "\n");
        return ok ? kExitOk : kExitNumerical;
    });
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    return guarded(cfg, log, "sweep", [&] {
        const std::vector<int> ks = cfg.sweep.k.empty() ? std::vector<int>{cfg.mesh.k} : cfg.sweep.k;
        const std::vector<double> ss = cfg.sweep.s.empty() ? std::vector<double>{cfg.s} : cfg.sweep.s;
        struct Row {
            int k;
            double s;
            int i;
            double lambda, c, residual;
        };
        std::vector<Row> rows;
        json errors = json::array();
        for (double s : ss)
            for (int k : ks) {
                const AssembledProblem prob = make_problem(cfg, k, s);
                for (int i : cfg.levels) {
                    auto r = solve_one(prob, i, cfg.solver);
                    if (auto* e = std::get_if<Eigenpair>(&r)) {
                        rows.push_back({k, s, i, e->lambda, e->c_value, e->residual});
                        log << "k = " << k << ", s = " << num(s) << ", i = " << i << ": lambda = " << num(e->lambda)
                            << "\n";
                    } else {
                        json err = std::get<json>(r);
                        err["s"] = s;
                        errors.push_back(err);
                    }
                }
            }

        std::string csv = "k,s,i,lambda,c_value,residual\n";
        for (const Row& r : rows)
            csv += std::to_string(r.k) + "," + num(r.s) + "," + std::to_string(r.i) + "," + num(r.lambda) + "," +
                   num(r.c) + "," + num(r.residual) + "\n";

        // Verdicts with 1e-6 relative slack; each group is ordered by its sweep variable.
        constexpr double slack = 1e-6;
        std::map<std::pair<double, int>, std::vector<Row>> by_k;
        std::map<std::pair<int, double>, std::vector<Row>> by_i;
        for (const Row& r : rows) {
            by_k[{r.s, r.i}].push_back(r);
            by_i[{r.k, r.s}].push_back(r);
        }
        bool c_in_k = true, c_in_i = true, lambda_in_i = true;
        for (auto& [_, g] : by_k) {
            std::sort(g.begin(), g.end(), [](const Row& x, const Row& y) { return x.k < y.k; });
            for (std::size_t j = 1; j < g.size(); ++j)
                if (g[j].c < g[j - 1].c * (1.0 - slack)) c_in_k = false;
        }
        for (auto& [_, g] : by_i) {
            std::sort(g.begin(), g.end(), [](const Row& x, const Row& y) { return x.i < y.i; });
            for (std::size_t j = 1; j < g.size(); ++j) {
                if (g[j].c > g[j - 1].c * (1.0 + slack)) c_in_i = false;
                if (g[j].lambda < g[j - 1].lambda * (1.0 - slack)) lambda_in_i = false;
            }
        }

        json summary;
        summary["schema"] = kSchema;
        summary["task"] = "sweep";
        summary["inputs"] = config_json(cfg);
        summary["table"] = cfg.output;
        summary["rows"] = rows.size();
        summary["verdicts"] = {{"c_nondecreasing_in_k", c_in_k},
                               {"c_nonincreasing_in_i", c_in_i},
                               {"lambda_nondecreasing_in_i", lambda_in_i}};
        summary["status"] = errors.empty() ? "converged" : "failed";
        summary["errors"] = std::move(errors);
        write_atomic(cfg.output, csv);
        write_atomic(companion_path(cfg.output), summary.dump(2) + "\n");
        return summary["status"] == "converged" ? kExitOk : kExitNumerical;
    });
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
    return guarded(cfg, log, "validate", [&] {
        const AssembledProblem prob = make_problem(cfg, cfg.mesh.k, cfg.s);
        const std::uint64_t seed = cfg.solver.rng_seed;
        const BatteryReport battery = property_battery(prob, cfg.trials, seed);
        std::vector<SubTest> tests = battery.tests;

        const int sweep = std::min(cfg.trials, 100);
        if (sweep > 0) {
            SubTest tr = tally("translation_estimate"), lm = tally("translation_modular_estimate");
            std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL);
            std::normal_distribution<double> normal(0.0, 1.0);
            std::uniform_real_distribution<double> shift(-0.49, 0.49);
            for (int t = 0; t < sweep; ++t) {
                Eigen::VectorXd u(prob.dim());
                for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = normal(rng);
                const double h = shift(rng);
                if (h == 0.0) continue;
                const auto a = translation_test(prob.basis(), prob.quadrature(), prob.young(), u, h);
                const auto b = lemma_b1_test(prob.basis(), prob.quadrature(), prob.young(), u, h);
                record(tr, a.rhs * (1.0 + 1e-3) - a.lhs);
                record(lm, b.rhs * (1.0 + 1e-3) - b.lhs);
            }
            tests.push_back(tr);
            tests.push_back(lm);
        }

        const auto p = prob.young().exponent();
        if (cfg.trials > 0 && prob.young().kind() == YoungKind::Power && p && *p == 2.0 && prob.growth().is_linear()) {
            SubTest oracle = tally("linear_oracle");
            const OracleSpectrum spec = dense_oracle_p2(prob, std::min(3, prob.dim()));
            record(oracle, 1e-10 - spec.max_residual);
            record(oracle, 1e-10 - spec.orthonormality_error);
            try {
                const Eigenpair e = solve_first(prob, cfg.solver);
                record(oracle, 1e-6 - std::abs(e.lambda / spec.eigenvalues[0] - 1.0));
            } catch (const ConvergenceError&) {
                record(oracle, -1.0);
            }
            tests.push_back(oracle);
        }

        json list = json::array();
        json failed = json::array();
        int failures = 0;
        for (const SubTest& t : tests) {
            list.push_back(subtest_json(t));
            failures += t.failures;
            if (t.failures > 0) failed.push_back(t.name);
            log << t.name << ": " << t.failures << "/" << t.trials << " failures\n";
        }
        json out;
        out["schema"] = kSchema;
        out["task"] = "validate";
        out["inputs"] = config_json(cfg);
        out["seed"] = seed;
        out["failures"] = failures;
        out["failed"] = std::move(failed);
        out["tests"] = std::move(list);
        write_atomic(cfg.output, out.dump(2) + "\n");
        return failures == 0 ? kExitOk : kExitNumerical;
    });
}

int run_task(const RunConfig& cfg, std::ostream& log) {
    if (cfg.task == "solve") return cmd_solve(cfg, log);
    if (cfg.task == "sweep") return cmd_sweep(cfg, log);
    if (cfg.task == "validate") return cmd_validate(cfg, log);
    log << "error: task: must be one of solve, sweep, validate\n";
    return kExitConfig;
}

} // namespace ospectra
