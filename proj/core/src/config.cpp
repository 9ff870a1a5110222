#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"

#include "ospectra/cli.hpp"
#include "ospectra/errors.hpp"

namespace ospectra {

namespace {

using json = nlohmann::ordered_json;

// A ConfigError that remembers which dotted field it concerns.
class FieldError : public ConfigError {
public:
    FieldError(std::string field, const std::string& msg) : ConfigError(field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw FieldError(path.empty() ? "config" : path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) throw FieldError(join(path, key), "unknown key");
}

double read_double(const json& j, const std::string& path) {
    if (!j.is_number()) throw FieldError(path, "expected a number");
    return j.get<double>();
}

template <class Int>
Int read_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw FieldError(path, "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
        if (j.is_number_unsigned()) return j.get<Int>();
        if (j.get<long long>() < 0) throw FieldError(path, "expected a nonnegative integer");
    }
    return j.get<Int>();
}

std::string read_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw FieldError(path, "expected a string");
    return j.get<std::string>();
}

template <class F>
void maybe(const json& j, const std::string& path, const char* key, F&& f) {
    if (j.contains(key)) f(j.at(key), join(path, key));
}

template <class T, class R>
std::vector<T> read_list(const json& j, const std::string& path, R&& read) {
    if (!j.is_array()) throw FieldError(path, "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

json to_json(const RunConfig& c) {
    json table = json::array();
    for (const auto& [t, m] : c.young.table) table.push_back({t, m});
    const SolverConfig& s = c.solver;
    json j;
    j["schema"] = kSchema;
    j["task"] = c.task;
    j["domain"] = {{"a", c.domain.a}, {"b", c.domain.b}};
    j["s"] = c.s;
    j["young"] = {{"kind", c.young.kind}, {"p", c.young.p}, {"table", table}};
    j["growth"] = {{"kind", c.growth.kind}, {"q", c.growth.q}, {"a1", c.growth.a1}, {"a2", c.growth.a2},
                   {"a3", c.growth.a3}};
    j["mesh"] = {{"k", c.mesh.k}, {"grading", c.mesh.grading}, {"exterior_radius", c.mesh.exterior_radius},
                 {"quad_order", c.mesh.quad_order}};
    j["solver"] = {{"kkt_tol", s.kkt_tol},       {"max_iter", s.max_iter},
                   {"restarts", s.restarts},     {"rng_seed", s.rng_seed},
                   {"sphere_samples", s.sphere_samples}, {"armijo", s.armijo},
                   {"backtrack", s.backtrack},   {"max_backtracks", s.max_backtracks},
                   {"switch_tol", s.switch_tol}, {"newton_max", s.newton_max},
                   {"warmup_iter", s.warmup_iter}, {"max_outer", s.max_outer}};
    j["levels"] = c.levels;
    j["sweep"] = {{"k", c.sweep.k}, {"s", c.sweep.s}};
    j["trials"] = c.trials;
    j["output"] = c.output;
    return j;
}

// Missing keys keep their defaults.
RunConfig from_json(const json& j) {
    check_keys(j, "", {"schema", "task", "domain", "s", "young", "growth", "mesh", "solver", "levels", "sweep",
                       "trials", "output"});
    RunConfig c;
    maybe(j, "", "schema", [](const json& v, const std::string& p) {
        if (read_string(v, p) != kSchema) throw FieldError(p, std::string("expected \"") + kSchema + "\"");
    });
    maybe(j, "", "task", [&](const json& v, const std::string& p) { c.task = read_string(v, p); });
    maybe(j, "", "domain", [&](const json& d, const std::string& p) {
        check_keys(d, p, {"a", "b"});
        maybe(d, p, "a", [&](const json& v, const std::string& q) { c.domain.a = read_double(v, q); });
        maybe(d, p, "b", [&](const json& v, const std::string& q) { c.domain.b = read_double(v, q); });
    });
    maybe(j, "", "s", [&](const json& v, const std::string& p) { c.s = read_double(v, p); });
    maybe(j, "", "young", [&](const json& y, const std::string& p) {
        check_keys(y, p, {"kind", "p", "table"});
        maybe(y, p, "kind", [&](const json& v, const std::string& q) { c.young.kind = read_string(v, q); });
        maybe(y, p, "p", [&](const json& v, const std::string& q) { c.young.p = read_double(v, q); });
        maybe(y, p, "table", [&](const json& v, const std::string& q) {
            c.young.table = read_list<std::array<double, 2>>(v, q, [](const json& e, const std::string& r) {
                if (!e.is_array() || e.size() != 2) throw FieldError(r, "expected a [t, m] pair");
                return std::array<double, 2>{read_double(e[0], r), read_double(e[1], r)};
            });
        });
    });
    maybe(j, "", "growth", [&](const json& g, const std::string& p) {
        check_keys(g, p, {"kind", "q", "a1", "a2", "a3"});
        maybe(g, p, "kind", [&](const json& v, const std::string& q) { c.growth.kind = read_string(v, q); });
        maybe(g, p, "q", [&](const json& v, const std::string& q) { c.growth.q = read_double(v, q); });
        maybe(g, p, "a1", [&](const json& v, const std::string& q) { c.growth.a1 = read_double(v, q); });
        maybe(g, p, "a2", [&](const json& v, const std::string& q) { c.growth.a2 = read_double(v, q); });
        maybe(g, p, "a3", [&](const json& v, const std::string& q) { c.growth.a3 = read_double(v, q); });
    });
    maybe(j, "", "mesh", [&](const json& m, const std::string& p) {
        check_keys(m, p, {"k", "grading", "exterior_radius", "quad_order"});
        maybe(m, p, "k", [&](const json& v, const std::string& q) { c.mesh.k = read_int<int>(v, q); });
        maybe(m, p, "grading", [&](const json& v, const std::string& q) { c.mesh.grading = read_double(v, q); });
        maybe(m, p, "exterior_radius",
              [&](const json& v, const std::string& q) { c.mesh.exterior_radius = read_double(v, q); });
        maybe(m, p, "quad_order", [&](const json& v, const std::string& q) { c.mesh.quad_order = read_int<int>(v, q); });
    });
    maybe(j, "", "solver", [&](const json& s, const std::string& p) {
        SolverConfig& o = c.solver;
        check_keys(s, p, {"kkt_tol", "max_iter", "restarts", "rng_seed", "sphere_samples", "armijo", "backtrack",
                          "max_backtracks", "switch_tol", "newton_max", "warmup_iter", "max_outer"});
        auto dbl = [&](const char* key, double& out) {
            maybe(s, p, key, [&](const json& v, const std::string& q) { out = read_double(v, q); });
        };
        auto integer = [&](const char* key, int& out) {
            maybe(s, p, key, [&](const json& v, const std::string& q) { out = read_int<int>(v, q); });
        };
        dbl("kkt_tol", o.kkt_tol);
        integer("max_iter", o.max_iter);
        integer("restarts", o.restarts);
        maybe(s, p, "rng_seed", [&](const json& v, const std::string& q) { o.rng_seed = read_int<std::uint64_t>(v, q); });
        integer("sphere_samples", o.sphere_samples);
        dbl("armijo", o.armijo);
        dbl("backtrack", o.backtrack);
        integer("max_backtracks", o.max_backtracks);
        dbl("switch_tol", o.switch_tol);
        integer("newton_max", o.newton_max);
        integer("warmup_iter", o.warmup_iter);
        integer("max_outer", o.max_outer);
    });
    maybe(j, "", "levels", [&](const json& v, const std::string& p) {
        c.levels = read_list<int>(v, p, [](const json& e, const std::string& r) { return read_int<int>(e, r); });
    });
    maybe(j, "", "sweep", [&](const json& w, const std::string& p) {
        check_keys(w, p, {"k", "s"});
        maybe(w, p, "k", [&](const json& v, const std::string& q) {
            c.sweep.k = read_list<int>(v, q, [](const json& e, const std::string& r) { return read_int<int>(e, r); });
        });
        maybe(w, p, "s", [&](const json& v, const std::string& q) {
            c.sweep.s = read_list<double>(v, q, [](const json& e, const std::string& r) { return read_double(e, r); });
        });
    });
    maybe(j, "", "trials", [&](const json& v, const std::string& p) { c.trials = read_int<int>(v, p); });
    maybe(j, "", "output", [&](const json& v, const std::string& p) { c.output = read_string(v, p); });
    return c;
}

// 1-based line of the key named by a dotted path, found by walking the path through the text; 0 if absent.
int line_of(std::string_view text, const std::string& field) {
    std::size_t pos = 0;
    std::size_t start = 0;
    bool found = false;
    while (start <= field.size()) {
        std::size_t end = field.find('.', start);
        if (end == std::string::npos) end = field.size();
        std::string seg = field.substr(start, end - start);
        if (auto br = seg.find('['); br != std::string::npos) seg.resize(br);
        const std::size_t hit = text.find("\"" + seg + "\"", pos);
        if (hit == std::string_view::npos) break;
        found = true;
        pos = hit;
        start = end + 1;
    }
    if (!found) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

void wrap_input(const std::string& field, const auto& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        throw FieldError(field, e.what());
    }
}

} // namespace

void RunConfig::validate() const {
    if (!std::isfinite(domain.a) || !std::isfinite(domain.b) || !(domain.a < domain.b))
        throw FieldError("domain", "need finite a < b");
    if (!(s > 0.0 && s < 1.0)) throw FieldError("s", "must lie in (0, 1)");
    wrap_input("young", [&] { make_young(*this); });
    wrap_input("growth", [&] { make_growth(*this); });
    if (mesh.k < 1) throw FieldError("mesh.k", "must be >= 1");
    if (mesh.k > 1023) throw FieldError("mesh.k", "must be <= 1023");
    if (!(mesh.grading >= 1.0) || !std::isfinite(mesh.grading)) throw FieldError("mesh.grading", "must be >= 1");
    if (!(mesh.exterior_radius >= 0.0) || !std::isfinite(mesh.exterior_radius))
        throw FieldError("mesh.exterior_radius", "must be >= 0 (0 selects the default)");
    if (mesh.quad_order < 1 || mesh.quad_order > 64) throw FieldError("mesh.quad_order", "must lie in [1, 64]");
    try {
        solver.validate();
    } catch (const InputError& e) {
        const std::string msg = e.what();
        const auto colon = msg.find(' ');
        throw FieldError(msg.substr(0, colon), msg.substr(colon + 1));
    }
    if (task != "solve" && task != "sweep" && task != "validate")
        throw FieldError("task", "must be one of solve, sweep, validate");
    if (levels.empty()) throw FieldError("levels", "must list at least one level");
    for (int i : levels)
        if (i < 1) throw FieldError("levels", "levels must be >= 1");
    for (int k : sweep.k)
        if (k < 1 || k > 1023) throw FieldError("sweep.k", "entries must lie in [1, 1023]");
    for (double v : sweep.s)
        if (!(v > 0.0 && v < 1.0)) throw FieldError("sweep.s", "entries must lie in (0, 1)");
    if (task == "sweep") {
        const std::size_t points = std::max<std::size_t>(1, sweep.k.size()) * std::max<std::size_t>(1, sweep.s.size());
        if (points < 2) throw FieldError("sweep", "a sweep needs at least two points");
    }
    if (trials < 0) throw FieldError("trials", "must be >= 0");
    if (output.empty()) throw FieldError("output", "must not be empty");
}

bool RunConfig::operator==(const RunConfig& o) const {
    const SolverConfig& x = solver;
    const SolverConfig& y = o.solver;
    const bool same_solver = x.kkt_tol == y.kkt_tol && x.max_iter == y.max_iter && x.restarts == y.restarts &&
                             x.rng_seed == y.rng_seed && x.sphere_samples == y.sphere_samples &&
                             x.armijo == y.armijo && x.backtrack == y.backtrack &&
                             x.max_backtracks == y.max_backtracks && x.switch_tol == y.switch_tol &&
                             x.newton_max == y.newton_max && x.warmup_iter == y.warmup_iter &&
                             x.max_outer == y.max_outer;
    return same_solver && domain == o.domain && s == o.s && young == o.young && growth == o.growth &&
           mesh == o.mesh && task == o.task && levels == o.levels && sweep == o.sweep && trials == o.trials &&
           output == o.output;
}

RunConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
        const auto nl = text.rfind('\n', byte == 0 ? 0 : byte - 1);
        const std::size_t col = nl == std::string_view::npos ? byte + 1 : byte - nl;
        throw ConfigError("config:" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
    }
    try {
        RunConfig c = from_json(j);
        c.validate();
        return c;
    } catch (const FieldError& e) {
        const int line = line_of(text, e.field());
        throw ConfigError(line > 0 ? "config:" + std::to_string(line) + ": " + e.what() : std::string("config: ") + e.what());
    }
}

std::string emit_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

namespace {

void set_override(json& j, std::string_view key, std::string_view value) {
    const std::string flag = "--" + std::string(key);
    json* node = &j;
    std::string k(key);
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = k.find('.', start);
        const std::string seg = k.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (seg.empty() || !node->is_object() || !node->contains(seg)) throw ConfigError(flag + ": unknown config key");
        node = &(*node)[seg];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (node->is_object()) throw ConfigError(flag + ": cannot override a whole section");
    json v;
    try {
        v = json::parse(value);
    } catch (const json::parse_error&) {
        v = std::string(value);
    }
    // String fields take the raw text unless it was given quoted.
    if (node->is_string() && !v.is_string()) v = std::string(value);
    *node = v;
}

} // namespace

void apply_overrides(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& overrides) {
    json j = to_json(cfg);
    for (const auto& [key, value] : overrides) set_override(j, key, value);
    try {
        RunConfig c = from_json(j);
        c.validate();
        cfg = std::move(c);
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        auto names = [&msg](const std::string& field) {
            return msg.rfind(field, 0) == 0 && msg.size() > field.size() && msg[field.size()] == ':';
        };
        for (const auto& [key, value] : overrides)
            if (names(key)) throw ConfigError("--" + key + msg.substr(key.size()));
        // Errors reported against a whole section, e.g. "young: ..." for --young.p.
        for (const auto& [key, value] : overrides)
            if (const auto dot = key.find('.'); dot != std::string::npos && names(key.substr(0, dot)))
                throw ConfigError("--" + key + ": " + msg);
        if (overrides.size() == 1) throw ConfigError("--" + overrides.front().first + ": " + msg);
        throw;
    }
}

void apply_override(RunConfig& cfg, std::string_view key, std::string_view value) {
    apply_overrides(cfg, {{std::string(key), std::string(value)}});
}

YoungFunction make_young(const RunConfig& cfg) {
    const auto& y = cfg.young;
    if (y.kind == "power") return YoungFunction::power(y.p);
    if (y.kind == "exp") return YoungFunction::exp_minus_linear();
    if (y.kind == "custom") return YoungFunction::custom(y.table);
    throw InputError("kind must be one of power, exp, custom");
}

GrowthFunction make_growth(const RunConfig& cfg) {
    const auto& g = cfg.growth;
    const GrowthConstants c{g.a1, g.a2, g.a3};
    if (g.kind == "from_young") return GrowthFunction::from_young(make_young(cfg), c);
    if (g.kind == "power") return GrowthFunction::power(g.q, c);
    throw InputError("kind must be one of from_young, power");
}

AssembledProblem make_problem(const RunConfig& cfg, int k, double s) {
    PairQuadratureOptions opts;
    opts.grading = cfg.mesh.grading;
    opts.exterior_radius = cfg.mesh.exterior_radius;
    opts.order = cfg.mesh.quad_order;
    return AssembledProblem::build(cfg.domain.a, cfg.domain.b, k, s, make_young(cfg), make_growth(cfg), opts);
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, target);
}

} // namespace ospectra
