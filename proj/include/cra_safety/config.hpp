#pragma once

// Run configuration: JSON schema, validation, and the Boeing 747 presets.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cra_safety/controllers.hpp"
#include "cra_safety/cost.hpp"
#include "cra_safety/hybrid.hpp"
#include "cra_safety/plant.hpp"
#include "cra_safety/poly.hpp"
#include "cra_safety/synthesizer.hpp"
#include "cra_safety/verifier.hpp"

namespace cra {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    std::string name;
    ControlAffineSystem system;
    std::optional<Matrix> a_matrix;  // set when the system was given as x' = A x + B u
    std::optional<Matrix> b_matrix;
    SafetySpec spec;
    ArchitectureTiming timing;
    std::optional<AttackSchedule> attack;
    ControllerSpec policy = LinearPolicy{};
    std::optional<ControllerSpec> safety_controller;
    AdversaryMode adversary = BangBangWorst{};
    std::optional<Certificate> certificate;
    SynthesisConfig synthesis;  // also carries verifier settings and alpha
    long horizon_epochs = 150;
    std::uint64_t seed = 1;
    int substeps = kDefaultSubsteps;
    Vec x0;
    std::string out_dir = "out";

    bool operator==(const RunConfig&) const = default;

    /// Worst-case non-normal epochs N used by the certificate checks (at least 1).
    long n_epochs() const { return std::max<long>(1, timing.worst_case_non_normal()); }

    RunSetup setup() const {
        RunSetup s;
        s.sys = system;
        s.spec = spec;
        s.policy = policy;
        s.safety_controller = safety_controller;
        s.adversary = adversary;
        s.schedule = attack;
        s.timing = timing;
        s.horizon_epochs = horizon_epochs;
        s.substeps = substeps;
        s.seed = seed;
        s.x0 = x0;
        s.certificate = certificate;
        return s;
    }

    void validate() const {
        auto fail = [](const std::string& m) { throw ConfigError(m); };
        try {
            system.validate();
        } catch (const std::invalid_argument& e) {
            fail(std::string("/system: ") + e.what());
        }
        if (spec.h.n_vars() != system.n) fail("/spec/h: n_vars must equal the state dimension");
        try {
            spec.validate();
        } catch (const std::invalid_argument& e) {
            fail(std::string("/spec: ") + e.what());
        }
        try {
            timing.validate();
            if (attack) attack->validate();
            synthesis.validate();
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        if (x0.size() != system.n) fail("/x0: expected " + std::to_string(system.n) + " components");
        if (horizon_epochs < 1) fail("/horizon_epochs: must be >= 1");
        if (substeps < 1) fail("/substeps: must be >= 1");
        auto check_ctrl = [&](const ControllerSpec& c, const std::string& where) {
            if (const auto* lin = std::get_if<LinearPolicy>(&c)) {
                if (lin->gain.rows() != system.m || lin->gain.cols() != system.n)
                    fail(where + "/gain: expected " + std::to_string(system.m) + "x" + std::to_string(system.n));
            } else if (const auto* qp = std::get_if<CbfQpParams>(&c)) {
                try {
                    qp->validate(system.m);
                } catch (const std::invalid_argument& e) {
                    fail(where + ": " + e.what());
                }
            }
        };
        check_ctrl(policy, "/policy");
        if (safety_controller) check_ctrl(*safety_controller, "/safety_controller");
        if (timing.arch == ArchKind::Simplex && !safety_controller)
            fail("/safety_controller: required for the simplex architecture");
        if (const auto* s = std::get_if<ScriptedInput>(&adversary)) {
            if (s->sequence.empty()) fail("/adversary/sequence: must not be empty");
            for (const auto& u : s->sequence)
                if (u.size() != system.m) fail("/adversary/sequence: every input needs m components");
        }
        if (certificate) {
            if (!(certificate->c >= 0.0) || !(certificate->d >= 0.0))
                fail("/certificate: c and d must be >= 0");
            if (!(certificate->tau > 0.0)) fail("/certificate/tau: must be positive");
        }
    }
};

// ---- JSON encoding ----

inline json poly_to_json(const MultiPoly& p) {
    json terms = json::array();
    for (const auto& t : p.terms()) terms.push_back({{"exps", t.exps}, {"coef", t.coef}});
    return {{"n_vars", p.n_vars()}, {"terms", terms}};
}

inline json matrix_to_json(const Matrix& m) { return m.to_rows(); }
inline json box_to_json(const Box& b) { return {{"lo", b.lo()}, {"hi", b.hi()}}; }

inline json controller_to_json(const ControllerSpec& c) {
    if (const auto* lin = std::get_if<LinearPolicy>(&c))
        return {{"kind", "linear"}, {"gain", matrix_to_json(lin->gain)}, {"saturate", lin->saturate_to_u}};
    if (const auto* qp = std::get_if<CbfQpParams>(&c))
        return {{"kind", "cbf_qp"},
                {"q", matrix_to_json(qp->q)},
                {"gamma", qp->gamma},
                {"rho", qp->rho},
                {"mode", qp->mode == BarrierMode::Zeroing ? "zeroing" : "finite_time"}};
    return {{"kind", "random"}, {"seed", std::get<RandomUniformInput>(c).seed}};
}

inline json adversary_to_json(const AdversaryMode& a) {
    if (std::holds_alternative<BangBangWorst>(a)) return {{"kind", "bang_bang"}};
    if (const auto* s = std::get_if<ScriptedInput>(&a)) return {{"kind", "scripted"}, {"sequence", s->sequence}};
    return {{"kind", "random"}, {"seed", std::get<RandomUniformInput>(a).seed}};
}

inline json verdict_to_json(const CertifiedVerdict& v) {
    json j = {{"status", std::string(to_string(v.status))}};
    j["margin"] = std::isfinite(v.margin) ? json(v.margin) : json(nullptr);
    j["witness_x"] = v.witness_x;
    j["witness_u"] = v.witness_u;
    j["grid_resolution"] = v.grid_resolution;
    j["refinements_used"] = v.refinements_used;
    j["cells_evaluated"] = v.cells_evaluated;
    return j;
}

inline json policy_verdict_to_json(const PolicyVerdict& v) {
    return {{"inequality", verdict_to_json(v.inequality)}, {"input_bounds", verdict_to_json(v.inputs)}};
}

inline json config_to_json(const RunConfig& c) {
    json j;
    j["schema_version"] = c.schema_version;
    j["name"] = c.name;
    json sys;
    sys["n"] = c.system.n;
    sys["m"] = c.system.m;
    if (c.a_matrix && c.b_matrix) {
        sys["A"] = matrix_to_json(*c.a_matrix);
        sys["B"] = matrix_to_json(*c.b_matrix);
    } else {
        json f = json::array(), g = json::array();
        for (const auto& p : c.system.f) f.push_back(poly_to_json(p));
        for (const auto& row : c.system.g) {
            json r = json::array();
            for (const auto& p : row) r.push_back(poly_to_json(p));
            g.push_back(r);
        }
        sys["f"] = f;
        sys["g"] = g;
    }
    sys["state_domain"] = box_to_json(c.system.state_domain);
    sys["input_box"] = box_to_json(c.system.input_box);
    sys["delta"] = c.system.delta;
    j["system"] = sys;
    j["spec"] = {{"h", poly_to_json(c.spec.h)}, {"l1", c.spec.l1_coeffs}, {"budget", c.spec.budget}};
    j["timing"] = {{"arch", std::string(to_string(c.timing.arch))}, {"n1", c.timing.n1}, {"n2", c.timing.n2},
                   {"n3", c.timing.n3}, {"n4", c.timing.n4}, {"n5", c.timing.n5},
                   {"buffer_length", c.timing.buffer_length}};
    j["attack"] = c.attack ? json{{"cycle_length_epochs", c.attack->cycle_length_epochs},
                                  {"corrupted_epochs", c.attack->corrupted_epochs},
                                  {"first_attack_epoch", c.attack->first_attack_epoch}}
                           : json(nullptr);
    j["policy"] = controller_to_json(c.policy);
    j["safety_controller"] = c.safety_controller ? controller_to_json(*c.safety_controller) : json(nullptr);
    j["adversary"] = adversary_to_json(c.adversary);
    j["certificate"] = c.certificate ? json{{"c", c.certificate->c}, {"d", c.certificate->d}, {"tau", c.certificate->tau}}
                                     : json(nullptr);
    const auto& s = c.synthesis;
    j["verifier"] = {{"kappa", s.alpha.kappa},
                     {"initial_cells", s.verifier.initial_cells},
                     {"max_refinements", s.verifier.max_refinements},
                     {"max_cells", s.verifier.max_cells},
                     {"threads", s.verifier.threads}};
    j["synthesis"] = {{"eps_c", s.eps_c},
                      {"eps_d", s.eps_d},
                      {"c_max", s.c_max ? json(*s.c_max) : json(nullptr)},
                      {"d_max", s.d_max ? json(*s.d_max) : json(nullptr)},
                      {"tau_max", s.tau_max},
                      {"n_epochs", s.n_epochs},
                      {"sample_count", s.sample_count},
                      {"min_annulus_samples", s.min_annulus_samples},
                      {"lp_margin", s.lp_margin},
                      {"input_margin", s.input_margin},
                      {"theta_cap", s.theta_cap},
                      {"gain_cap", s.gain_cap},
                      {"max_rounds", s.max_rounds},
                      {"c_max_grid", s.c_max_grid},
                      {"seed", s.seed}};
    j["horizon_epochs"] = c.horizon_epochs;
    j["seed"] = c.seed;
    j["substeps"] = c.substeps;
    j["x0"] = c.x0;
    j["outputs"] = {{"dir", c.out_dir}};
    return j;
}

// ---- JSON decoding ----

namespace detail {

// Reads typed fields and reports failures by JSON pointer.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    std::string at(const char* key) const { return path_ + "/" + key; }

    const json& raw(const char* key) const {
        if (!j_.contains(key)) throw ConfigError(at(key) + ": missing required field");
        return j_.at(key);
    }

    template <class T>
    T get(const char* key) const {
        try {
            return raw(key).template get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(at(key) + ": " + e.what());
        }
    }

    template <class T>
    T get_or(const char* key, T fallback) const {
        return has(key) ? get<T>(key) : fallback;
    }

    Reader sub(const char* key) const { return Reader(raw(key), at(key)); }

private:
    const json& j_;
    std::string path_;
};

inline Matrix matrix_from(const json& j, const std::string& where) {
    try {
        const auto rows = j.get<std::vector<Vec>>();
        if (rows.empty()) throw ConfigError(where + ": matrix must have at least one row");
        for (const auto& r : rows)
            if (r.size() != rows.front().size()) throw ConfigError(where + ": ragged matrix rows");
        return Matrix::from_rows(rows);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

inline Box box_from(const Reader& r) {
    try {
        return Box(r.get<Vec>("lo"), r.get<Vec>("hi"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(r.at("lo") + ": " + e.what());
    }
}

}  // namespace detail

inline MultiPoly poly_from_json(const json& j, const std::string& where = "") {
    detail::Reader r(j, where);
    const auto n = r.get<std::size_t>("n_vars");
    std::vector<Term> terms;
    const json& arr = r.raw("terms");
    if (!arr.is_array()) throw ConfigError(r.at("terms") + ": expected an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
        detail::Reader t(arr[k], r.at("terms") + "/" + std::to_string(k));
        terms.push_back({t.get<Exponents>("exps"), t.get<double>("coef")});
    }
    try {
        return MultiPoly(n, terms);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(r.at("terms") + ": " + e.what());
    }
}

inline ControllerSpec controller_from_json(const json& j, const std::string& where) {
    detail::Reader r(j, where);
    const auto kind = r.get<std::string>("kind");
    if (kind == "linear") return LinearPolicy{detail::matrix_from(r.raw("gain"), r.at("gain")), r.get_or("saturate", true)};
    if (kind == "cbf_qp") {
        CbfQpParams p;
        p.q = detail::matrix_from(r.raw("q"), r.at("q"));
        p.gamma = r.get_or("gamma", 1.0);
        p.rho = r.get_or("rho", 0.0);
        const auto mode = r.get_or<std::string>("mode", "zeroing");
        if (mode == "zeroing") p.mode = BarrierMode::Zeroing;
        else if (mode == "finite_time") p.mode = BarrierMode::FiniteTime;
        else throw ConfigError(r.at("mode") + ": expected zeroing or finite_time");
        return p;
    }
    if (kind == "random") return RandomUniformInput{r.get_or<std::uint64_t>("seed", 1)};
    throw ConfigError(r.at("kind") + ": unknown controller kind '" + kind + "'");
}

inline AdversaryMode adversary_from_json(const json& j, const std::string& where) {
    detail::Reader r(j, where);
    const auto kind = r.get<std::string>("kind");
    if (kind == "bang_bang") return BangBangWorst{};
    if (kind == "scripted") return ScriptedInput{r.get<std::vector<Vec>>("sequence")};
    if (kind == "random") return RandomUniformInput{r.get_or<std::uint64_t>("seed", 1)};
    throw ConfigError(r.at("kind") + ": unknown adversary kind '" + kind + "'");
}

inline RunConfig config_from_json(const json& j) {
    detail::Reader r(j, "");
    RunConfig c;
    c.schema_version = r.get_or("schema_version", kSchemaVersion);
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("/schema_version: unsupported version " + std::to_string(c.schema_version));
    c.name = r.get_or<std::string>("name", "");

    const auto sys = r.sub("system");
    const auto n = sys.get<std::size_t>("n");
    const auto m = sys.get<std::size_t>("m");
    const Box x_box = detail::box_from(sys.sub("state_domain"));
    const Box u_box = detail::box_from(sys.sub("input_box"));
    const double delta = sys.get<double>("delta");
    try {
        if (sys.has("A")) {
            c.a_matrix = detail::matrix_from(sys.raw("A"), sys.at("A"));
            c.b_matrix = detail::matrix_from(sys.raw("B"), sys.at("B"));
            if (c.a_matrix->rows() != n || c.b_matrix->cols() != m)
                throw ConfigError(sys.at("A") + ": A must be n x n and B n x m");
            c.system = ControlAffineSystem::linear(*c.a_matrix, *c.b_matrix, x_box, u_box, delta);
        } else {
            c.system.n = n;
            c.system.m = m;
            const json& f = sys.raw("f");
            const json& g = sys.raw("g");
            if (!f.is_array() || !g.is_array()) throw ConfigError(sys.at("f") + ": f and g must be arrays");
            for (std::size_t i = 0; i < f.size(); ++i)
                c.system.f.push_back(poly_from_json(f[i], sys.at("f") + "/" + std::to_string(i)));
            for (std::size_t i = 0; i < g.size(); ++i) {
                std::vector<MultiPoly> row;
                if (!g[i].is_array()) throw ConfigError(sys.at("g") + "/" + std::to_string(i) + ": expected an array");
                for (std::size_t k = 0; k < g[i].size(); ++k)
                    row.push_back(poly_from_json(g[i][k], sys.at("g") + "/" + std::to_string(i) + "/" + std::to_string(k)));
                c.system.g.push_back(std::move(row));
            }
            c.system.state_domain = x_box;
            c.system.input_box = u_box;
            c.system.delta = delta;
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("/system: ") + e.what());
    }

    const auto spec = r.sub("spec");
    c.spec.h = poly_from_json(spec.raw("h"), spec.at("h"));
    c.spec.l1_coeffs = spec.get_or<Vec>("l1", Vec{0.0, 1.0});
    c.spec.budget = spec.get<double>("budget");

    if (r.has("timing")) {
        const auto t = r.sub("timing");
        try {
            c.timing.arch = arch_from_string(t.get_or<std::string>("arch", "redundant"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(t.at("arch") + ": " + e.what());
        }
        c.timing.n1 = t.get_or("n1", c.timing.n1);
        c.timing.n2 = t.get_or("n2", c.timing.n2);
        c.timing.n3 = t.get_or("n3", c.timing.n3);
        c.timing.n4 = t.get_or("n4", c.timing.n4);
        c.timing.n5 = t.get_or("n5", c.timing.n5);
        c.timing.buffer_length = t.get_or("buffer_length", c.timing.buffer_length);
    }
    if (r.has("attack")) {
        const auto a = r.sub("attack");
        c.attack = AttackSchedule{a.get<long>("cycle_length_epochs"), a.get_or<long>("corrupted_epochs", 0),
                                  a.get_or<long>("first_attack_epoch", 0)};
    }
    if (r.has("policy")) c.policy = controller_from_json(r.raw("policy"), "/policy");
    if (r.has("safety_controller"))
        c.safety_controller = controller_from_json(r.raw("safety_controller"), "/safety_controller");
    if (r.has("adversary")) c.adversary = adversary_from_json(r.raw("adversary"), "/adversary");
    if (r.has("certificate")) {
        const auto cert = r.sub("certificate");
        c.certificate = Certificate{cert.get<double>("c"), cert.get<double>("d"), cert.get<double>("tau")};
    }
    auto& s = c.synthesis;
    if (r.has("verifier")) {
        const auto v = r.sub("verifier");
        s.alpha.kappa = v.get_or("kappa", s.alpha.kappa);
        s.verifier.initial_cells = v.get_or("initial_cells", s.verifier.initial_cells);
        s.verifier.max_refinements = v.get_or("max_refinements", s.verifier.max_refinements);
        s.verifier.max_cells = v.get_or("max_cells", s.verifier.max_cells);
        s.verifier.threads = v.get_or("threads", s.verifier.threads);
    }
    if (r.has("synthesis")) {
        const auto y = r.sub("synthesis");
        s.eps_c = y.get_or("eps_c", s.eps_c);
        s.eps_d = y.get_or("eps_d", s.eps_d);
        if (y.has("c_max")) s.c_max = y.get<double>("c_max");
        if (y.has("d_max")) s.d_max = y.get<double>("d_max");
        s.tau_max = y.get_or("tau_max", s.tau_max);
        s.n_epochs = y.get_or("n_epochs", c.n_epochs());
        s.sample_count = y.get_or("sample_count", s.sample_count);
        s.min_annulus_samples = y.get_or("min_annulus_samples", s.min_annulus_samples);
        s.lp_margin = y.get_or("lp_margin", s.lp_margin);
        s.input_margin = y.get_or("input_margin", s.input_margin);
        s.theta_cap = y.get_or("theta_cap", s.theta_cap);
        s.gain_cap = y.get_or("gain_cap", s.gain_cap);
        s.max_rounds = y.get_or("max_rounds", s.max_rounds);
        s.c_max_grid = y.get_or("c_max_grid", s.c_max_grid);
        s.seed = y.get_or("seed", s.seed);
    } else {
        s.n_epochs = c.n_epochs();
    }
    c.horizon_epochs = r.get_or("horizon_epochs", c.horizon_epochs);
    c.seed = r.get_or("seed", c.seed);
    c.substeps = r.get_or("substeps", c.substeps);
    c.x0 = r.get<Vec>("x0");
    if (r.has("outputs")) c.out_dir = r.sub("outputs").get_or<std::string>("dir", c.out_dir);
    c.validate();
    return c;
}

/// Parses JSON text; syntax errors carry line and column.
inline RunConfig config_from_text(const std::string& text, const std::string& source = "config") {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
    }
    try {
        return config_from_json(j);
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_text(ss.str(), path);
}

// ---- Boeing 747 lateral dynamics ----

inline Matrix boeing_a() {
    return Matrix{{-0.0558, -0.9968, 0.0802, 0.0415},
                  {0.598, -0.115, -0.0318, 0.0},
                  {-3.05, 0.388, -0.465, 0.0},
                  {0.0, 0.0805, 1.0, 0.0}};
}
inline Matrix boeing_b() { return Matrix{{0.00729}, {-0.475}, {0.153}, {0.0}}; }
inline Matrix boeing_gain_scenario_1() { return Matrix{{-9.231e-3, 0.503, -1.805e-3, 2.373e-5}}; }
inline Matrix boeing_gain_scenario_2() { return Matrix{{0.03017, 0.05395, -4.753e-3, 7.513e-5}}; }
inline constexpr double kBoeingYawBound = 0.025;
inline constexpr double kBoeingInputBound = 0.02;

/// h(x) = 0.025^2 - x2^2.
inline MultiPoly boeing_barrier() {
    const MultiPoly x2 = MultiPoly::variable(4, 1);
    return MultiPoly::constant(4, kBoeingYawBound * kBoeingYawBound) - x2 * x2;
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"boeing-I", "boeing-II", "boeing-III"};
    return names;
}

inline RunConfig preset(const std::string& name) {
    RunConfig c;
    c.name = name;
    c.a_matrix = boeing_a();
    c.b_matrix = boeing_b();
    const Box x_box(Vec{-0.01, -0.05, -0.01, -0.01}, Vec{0.01, 0.05, 0.01, 0.01});
    const Box u_box(Vec{-kBoeingInputBound}, Vec{kBoeingInputBound});
    c.system = ControlAffineSystem::linear(*c.a_matrix, *c.b_matrix, x_box, u_box, 0.05);
    c.spec = SafetySpec{boeing_barrier(), {0.0, 1.0}, 0.02};
    c.x0 = {0.01, 0.025, 0.0, 0.0};
    c.horizon_epochs = 150;
    c.synthesis.eps_c = 1.25e-4;
    c.synthesis.eps_d = 1e-4;
    c.synthesis.c_max_grid = 21;
    c.out_dir = "out/" + name;
    if (name == "boeing-I") {
        c.timing.arch = ArchKind::Redundant;
        c.timing.n1 = 2;
        c.timing.n2 = 2;
        c.timing.buffer_length = 3;
        c.attack = AttackSchedule{8, 2, 0};
        c.policy = LinearPolicy{boeing_gain_scenario_1()};
        c.certificate = Certificate{0.0, 0.4, 0.16};
    } else if (name == "boeing-II") {
        c.timing.arch = ArchKind::RestartBased;
        c.timing.n3 = 2;
        c.timing.n4 = 4;
        c.timing.n5 = 20;
        c.attack = AttackSchedule{10, 2, 0};
        c.policy = LinearPolicy{boeing_gain_scenario_2()};
        c.certificate = Certificate{0.0, 0.4, 0.18};
    } else if (name == "boeing-III") {
        c.timing.arch = ArchKind::Simplex;
        c.policy = RandomUniformInput{c.seed};
        c.safety_controller = CbfQpParams{Matrix::identity(1), 1.0, 0.0, BarrierMode::Zeroing};
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected boeing-I, boeing-II or boeing-III)");
    }
    c.synthesis.n_epochs = c.n_epochs();
    c.validate();
    return c;
}

/// Applies --seed: the run seed and every random controller or adversary seed.
inline void apply_seed(RunConfig& c, std::uint64_t seed) {
    c.seed = seed;
    if (auto* r = std::get_if<RandomUniformInput>(&c.policy)) r->seed = seed;
    if (c.safety_controller)
        if (auto* r = std::get_if<RandomUniformInput>(&*c.safety_controller)) r->seed = seed;
    if (auto* r = std::get_if<RandomUniformInput>(&c.adversary)) r->seed = seed;
}

}  // namespace cra
