#include "servo/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <utility>

#include "servo/controller.hpp"

namespace servo {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("invalid number '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("invalid unsigned integer '" + std::string(s) + "'");
    return v;
}

bool parse_bool(std::string_view s) {
    s = trim(s);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("invalid boolean '" + std::string(s) + "' (use true/false)");
}

std::vector<double> parse_dvec(std::string_view s) {
    std::vector<double> out;
    std::size_t start = 0;
    const std::string str(s);
    while (start <= str.size()) {
        const std::size_t comma = str.find(',', start);
        const std::string_view item(str.data() + start,
                                    (comma == std::string::npos ? str.size() : comma) - start);
        out.push_back(parse_double(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

std::string fmt_dvec(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += fmt_double(v[i]);
    }
    return s;
}

KeyInfo dkey(std::string sec, std::string key, std::string desc,
             std::function<double&(ExperimentConfig&)> ref) {
    KeyInfo k{std::move(sec), std::move(key), std::move(desc), true, nullptr, nullptr};
    k.assign = [ref](ExperimentConfig& c, std::string_view v) { ref(c) = parse_double(v); };
    k.format = [ref](const ExperimentConfig& c) {
        return fmt_double(ref(const_cast<ExperimentConfig&>(c)));
    };
    return k;
}

KeyInfo skey(std::string sec, std::string key, std::string desc,
             std::function<std::size_t&(ExperimentConfig&)> ref) {
    KeyInfo k{std::move(sec), std::move(key), std::move(desc), true, nullptr, nullptr};
    k.assign = [ref](ExperimentConfig& c, std::string_view v) {
        ref(c) = static_cast<std::size_t>(parse_u64(v));
    };
    k.format = [ref](const ExperimentConfig& c) {
        return std::to_string(ref(const_cast<ExperimentConfig&>(c)));
    };
    return k;
}

KeyInfo u64key(std::string sec, std::string key, std::string desc,
               std::function<std::uint64_t&(ExperimentConfig&)> ref) {
    KeyInfo k{std::move(sec), std::move(key), std::move(desc), true, nullptr, nullptr};
    k.assign = [ref](ExperimentConfig& c, std::string_view v) { ref(c) = parse_u64(v); };
    k.format = [ref](const ExperimentConfig& c) {
        return std::to_string(ref(const_cast<ExperimentConfig&>(c)));
    };
    return k;
}

KeyInfo bkey(std::string sec, std::string key, std::string desc,
             std::function<bool&(ExperimentConfig&)> ref) {
    KeyInfo k{std::move(sec), std::move(key), std::move(desc), true, nullptr, nullptr};
    k.assign = [ref](ExperimentConfig& c, std::string_view v) { ref(c) = parse_bool(v); };
    k.format = [ref](const ExperimentConfig& c) {
        return ref(const_cast<ExperimentConfig&>(c)) ? "true" : "false";
    };
    return k;
}

KeyInfo dveckey(std::string sec, std::string key, std::string desc,
                std::function<std::vector<double>&(ExperimentConfig&)> ref) {
    KeyInfo k{std::move(sec), std::move(key), std::move(desc), true, nullptr, nullptr};
    k.assign = [ref](ExperimentConfig& c, std::string_view v) { ref(c) = parse_dvec(v); };
    k.format = [ref](const ExperimentConfig& c) {
        return fmt_dvec(ref(const_cast<ExperimentConfig&>(c)));
    };
    return k;
}

std::vector<KeyInfo> build_schema() {
    std::vector<KeyInfo> s;
    auto d = [&](const char* sec, const char* key, const char* desc, auto ref) {
        s.push_back(dkey(sec, key, desc, ref));
    };

    d("plant", "M", "piston mass (kg)", [](ExperimentConfig& c) -> double& { return c.plant.M; });
    d("plant", "m", "load mass (kg)", [](ExperimentConfig& c) -> double& { return c.plant.m; });
    d("plant", "A1", "chamber 1 area (m^2)",
      [](ExperimentConfig& c) -> double& { return c.plant.A1; });
    d("plant", "A2", "chamber 2 area (m^2)",
      [](ExperimentConfig& c) -> double& { return c.plant.A2; });
    d("plant", "l", "cylinder half-stroke (m)",
      [](ExperimentConfig& c) -> double& { return c.plant.l; });
    d("plant", "g", "gravitational acceleration (m/s^2)",
      [](ExperimentConfig& c) -> double& { return c.plant.g; });
    d("plant", "theta", "incline angle (rad)",
      [](ExperimentConfig& c) -> double& { return c.plant.theta; });
    d("plant", "epsilon", "thermodynamic coefficient",
      [](ExperimentConfig& c) -> double& { return c.plant.epsilon; });
    d("plant", "C", "valve flow constant",
      [](ExperimentConfig& c) -> double& { return c.plant.C; });
    d("plant", "delta_h", "heat/leakage term in the pressure rates",
      [](ExperimentConfig& c) -> double& { return c.plant.delta_h; });
    d("plant", "b_v", "viscous friction coefficient (N*s/m)",
      [](ExperimentConfig& c) -> double& { return c.plant.b_v; });
    d("plant", "F_c", "Coulomb friction magnitude (N)",
      [](ExperimentConfig& c) -> double& { return c.plant.F_c; });
    d("plant", "P_min", "minimum admissible absolute pressure (Pa)",
      [](ExperimentConfig& c) -> double& { return c.plant.P_min; });

    s.push_back(skey("fuzzy", "input_mfs", "triangular MFs per input variable",
                     [](ExperimentConfig& c) -> std::size_t& { return c.input_mfs; }));
    s.push_back(skey("fuzzy", "output_mfs",
                     "shared consequent centers; 0 gives one center per rule",
                     [](ExperimentConfig& c) -> std::size_t& { return c.output_mfs; }));
    d("fuzzy", "y_lo", "velocity universe lower bound",
      [](ExperimentConfig& c) -> double& { return c.y_lo; });
    d("fuzzy", "y_hi", "velocity universe upper bound",
      [](ExperimentConfig& c) -> double& { return c.y_hi; });
    d("fuzzy", "de_lo", "error-derivative universe lower bound",
      [](ExperimentConfig& c) -> double& { return c.de_lo; });
    d("fuzzy", "de_hi", "error-derivative universe upper bound",
      [](ExperimentConfig& c) -> double& { return c.de_hi; });

    s.push_back(dveckey("controller", "K", "feedback gains, comma separated (2 entries)",
                        [](ExperimentConfig& c) -> std::vector<double>& { return c.K; }));
    d("controller", "p_gain", "adaptation weighting: P = p_gain * identity",
      [](ExperimentConfig& c) -> double& { return c.p_gain; });
    d("controller", "gamma_f", "adaptation rate for the f estimate",
      [](ExperimentConfig& c) -> double& { return c.gamma_f; });
    d("controller", "gamma_g", "adaptation rate for the g estimate",
      [](ExperimentConfig& c) -> double& { return c.gamma_g; });
    d("controller", "g_min", "lower guard on the g estimate",
      [](ExperimentConfig& c) -> double& { return c.g_min; });
    d("controller", "u_max", "valve command saturation",
      [](ExperimentConfig& c) -> double& { return c.u_max; });
    d("controller", "theta_f_bound", "projection bound: |theta_f entries| <= bound",
      [](ExperimentConfig& c) -> double& { return c.theta_f_bound; });
    d("controller", "theta_g_lo", "projection floor for theta_g entries",
      [](ExperimentConfig& c) -> double& { return c.theta_g_lo; });
    d("controller", "theta_g_hi", "projection ceiling for theta_g entries",
      [](ExperimentConfig& c) -> double& { return c.theta_g_hi; });
    s.push_back(dveckey("controller", "theta_f_init",
                        "initial f centers: one value broadcasts, or a full vector",
                        [](ExperimentConfig& c) -> std::vector<double>& { return c.theta_f_init; }));
    s.push_back(dveckey("controller", "theta_g_init",
                        "initial g centers: one value broadcasts, or a full vector",
                        [](ExperimentConfig& c) -> std::vector<double>& { return c.theta_g_init; }));

    s.push_back(skey("pso", "particles", "swarm size",
                     [](ExperimentConfig& c) -> std::size_t& { return c.particles; }));
    s.push_back(skey("pso", "max_iters", "swarm update rounds; 0 skips optimization",
                     [](ExperimentConfig& c) -> std::size_t& { return c.max_iters; }));
    d("pso", "w", "inertia weight", [](ExperimentConfig& c) -> double& { return c.w; });
    d("pso", "c1", "cognitive coefficient", [](ExperimentConfig& c) -> double& { return c.c1; });
    d("pso", "c2", "social coefficient", [](ExperimentConfig& c) -> double& { return c.c2; });
    s.push_back(skey("pso", "stall_iters", "convergence window (rounds)",
                     [](ExperimentConfig& c) -> std::size_t& { return c.stall_iters; }));
    d("pso", "stall_tol", "relative window improvement threshold; 0 disables",
      [](ExperimentConfig& c) -> double& { return c.stall_tol; });
    s.push_back(u64key("pso", "seed", "master RNG seed",
                       [](ExperimentConfig& c) -> std::uint64_t& { return c.seed; }));
    d("pso", "v_max_frac", "velocity clamp as a fraction of each bound range",
      [](ExperimentConfig& c) -> double& { return c.v_max_frac; });
    {
        KeyInfo k{"pso", "workers", "fitness evaluation threads; 0 = one per core", false,
                  nullptr, nullptr};
        k.assign = [](ExperimentConfig& c, std::string_view v) {
            c.workers = static_cast<unsigned>(parse_u64(v));
        };
        k.format = [](const ExperimentConfig& c) { return std::to_string(c.workers); };
        s.push_back(std::move(k));
    }
    s.push_back(bkey("pso", "tune_theta_f", "include the theta_f block in the candidate",
                     [](ExperimentConfig& c) -> bool& { return c.tune_theta_f; }));
    s.push_back(bkey("pso", "tune_theta_g", "include the theta_g block in the candidate",
                     [](ExperimentConfig& c) -> bool& { return c.tune_theta_g; }));
    s.push_back(bkey("pso", "tune_scales", "include the universe scales in the candidate",
                     [](ExperimentConfig& c) -> bool& { return c.tune_scales; }));
    s.push_back(bkey("pso", "tune_K", "include the feedback gains in the candidate",
                     [](ExperimentConfig& c) -> bool& { return c.tune_K; }));
    d("pso", "scale_lo", "universe scale factor lower bound",
      [](ExperimentConfig& c) -> double& { return c.scale_lo; });
    d("pso", "scale_hi", "universe scale factor upper bound",
      [](ExperimentConfig& c) -> double& { return c.scale_hi; });
    d("pso", "k_lo", "per-gain lower bound for tuned K",
      [](ExperimentConfig& c) -> double& { return c.k_lo; });
    d("pso", "k_hi", "per-gain upper bound for tuned K",
      [](ExperimentConfig& c) -> double& { return c.k_hi; });

    d("sim", "dt", "integrator step (s)", [](ExperimentConfig& c) -> double& { return c.dt; });
    d("sim", "t_final", "horizon (s), also the trajectory ramp length",
      [](ExperimentConfig& c) -> double& { return c.t_final; });
    s.push_back(skey("sim", "log_every", "row decimation for trajectory CSV",
                     [](ExperimentConfig& c) -> std::size_t& { return c.log_every; }));
    d("sim", "x0", "initial piston position (m)",
      [](ExperimentConfig& c) -> double& { return c.x0; });
    d("sim", "v0", "initial piston velocity (m/s)",
      [](ExperimentConfig& c) -> double& { return c.v0; });
    d("sim", "P1_0", "initial chamber 1 pressure (Pa)",
      [](ExperimentConfig& c) -> double& { return c.P1_0; });
    d("sim", "P2_0", "initial chamber 2 pressure (Pa)",
      [](ExperimentConfig& c) -> double& { return c.P2_0; });
    d("sim", "dist_amp", "disturbance force amplitude (N)",
      [](ExperimentConfig& c) -> double& { return c.dist_amp; });
    d("sim", "dist_freq", "disturbance frequency (Hz)",
      [](ExperimentConfig& c) -> double& { return c.dist_freq; });

    d("trajectory", "y0", "desired start velocity",
      [](ExperimentConfig& c) -> double& { return c.y0; });
    d("trajectory", "y1", "desired end velocity",
      [](ExperimentConfig& c) -> double& { return c.y1; });

    {
        KeyInfo k{"output", "dir", "default artifact directory (CLI --out overrides)", true,
                  nullptr, nullptr};
        k.assign = [](ExperimentConfig& c, std::string_view v) { c.out_dir = trim(v); };
        k.format = [](const ExperimentConfig& c) { return c.out_dir; };
        s.push_back(std::move(k));
    }
    return s;
}

const KeyInfo* find_key(std::string_view section, std::string_view key) {
    for (const auto& k : config_schema())
        if (k.section == section && k.key == key) return &k;
    return nullptr;
}

bool section_exists(std::string_view section) {
    for (const auto& k : config_schema())
        if (k.section == section) return true;
    return false;
}

[[noreturn]] void fail_at(const std::string& name, std::size_t line, std::size_t col,
                          const std::string& msg) {
    throw ConfigError(name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

void check(bool ok, const char* path, const char* rule) {
    if (!ok) throw ConfigError(std::string(path) + ": " + rule);
}

std::size_t theta_dim_of(const ExperimentConfig& cfg) {
    return cfg.output_mfs > 0 ? cfg.output_mfs : cfg.input_mfs * cfg.input_mfs;
}

std::vector<double> broadcast(const std::vector<double>& init, std::size_t dim) {
    if (init.size() == 1) return std::vector<double>(dim, init[0]);
    return init;
}

}  // namespace

const std::vector<KeyInfo>& config_schema() {
    static const std::vector<KeyInfo> schema = build_schema();
    return schema;
}

ExperimentConfig parse_config(std::string_view text, const std::string& name) {
    ExperimentConfig cfg;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
        ++line_no;
        const std::size_t line_start = pos;
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

        std::string_view line = raw;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string_view::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t col = static_cast<std::size_t>(line.data() - raw.data()) + 1;
        (void)line_start;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail_at(name, line_no, col, "unterminated section header");
            const std::string sec(trim(line.substr(1, line.size() - 2)));
            if (!section_exists(sec))
                fail_at(name, line_no, col, "unknown section '" + sec + "'");
            section = sec;
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            fail_at(name, line_no, col, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const std::size_t value_col =
            value.empty() ? col + eq + 1
                          : static_cast<std::size_t>(value.data() - raw.data()) + 1;
        if (key.empty()) fail_at(name, line_no, col, "missing key before '='");
        if (section.empty())
            fail_at(name, line_no, col, "key '" + key + "' appears before any [section]");
        const KeyInfo* info = find_key(section, key);
        if (!info)
            fail_at(name, line_no, col, "unknown key " + section + "." + key);
        try {
            info->assign(cfg, value);
        } catch (const ConfigError& e) {
            fail_at(name, line_no, value_col, section + "." + key + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text, path);
}

void validate_config(const ExperimentConfig& cfg) {
    check(cfg.plant.M > 0.0, "plant.M", "must be > 0");
    check(cfg.plant.m >= 0.0, "plant.m", "must be >= 0");
    check(cfg.plant.A1 > 0.0, "plant.A1", "must be > 0");
    check(cfg.plant.A2 > 0.0, "plant.A2", "must be > 0");
    check(cfg.plant.l > 0.0, "plant.l", "must be > 0");
    check(cfg.plant.epsilon > 0.0, "plant.epsilon", "must be > 0");
    check(cfg.plant.C > 0.0, "plant.C", "must be > 0");
    check(cfg.plant.P_min > 0.0, "plant.P_min", "must be > 0");
    check(cfg.plant.b_v >= 0.0, "plant.b_v", "must be >= 0");
    check(cfg.plant.F_c >= 0.0, "plant.F_c", "must be >= 0");

    check(cfg.input_mfs >= 2, "fuzzy.input_mfs", "must be >= 2");
    check(cfg.y_lo < cfg.y_hi, "fuzzy.y_lo", "must be < fuzzy.y_hi");
    check(cfg.de_lo < cfg.de_hi, "fuzzy.de_lo", "must be < fuzzy.de_hi");

    check(cfg.K.size() == 2, "controller.K", "exactly 2 gains (the loop is second order)");
    check(is_hurwitz(cfg.K), "controller.K", "gains must be Hurwitz (both > 0)");
    check(cfg.p_gain > 0.0, "controller.p_gain", "must be > 0");
    check(cfg.gamma_f > 0.0, "controller.gamma_f", "must be > 0");
    check(cfg.gamma_g > 0.0, "controller.gamma_g", "must be > 0");
    check(cfg.g_min > 0.0, "controller.g_min", "must be > 0");
    check(cfg.u_max > 0.0, "controller.u_max", "must be > 0");
    check(cfg.theta_f_bound > 0.0, "controller.theta_f_bound", "must be > 0");
    check(cfg.theta_g_lo >= cfg.g_min, "controller.theta_g_lo", "must be >= controller.g_min");
    check(cfg.theta_g_hi > cfg.theta_g_lo, "controller.theta_g_hi",
          "must be > controller.theta_g_lo");

    const std::size_t dim = theta_dim_of(cfg);
    check(cfg.theta_f_init.size() == 1 || cfg.theta_f_init.size() == dim,
          "controller.theta_f_init", "one value or one per consequent center");
    check(cfg.theta_g_init.size() == 1 || cfg.theta_g_init.size() == dim,
          "controller.theta_g_init", "one value or one per consequent center");
    for (double v : cfg.theta_f_init)
        check(std::abs(v) <= cfg.theta_f_bound, "controller.theta_f_init",
              "values must lie within +-theta_f_bound");
    for (double v : cfg.theta_g_init)
        check(v >= cfg.theta_g_lo && v <= cfg.theta_g_hi, "controller.theta_g_init",
              "values must lie within [theta_g_lo, theta_g_hi]");

    check(cfg.particles >= 1, "pso.particles", "must be >= 1");
    check(cfg.w >= 0.0, "pso.w", "must be >= 0");
    check(cfg.c1 >= 0.0, "pso.c1", "must be >= 0");
    check(cfg.c2 >= 0.0, "pso.c2", "must be >= 0");
    check(cfg.stall_iters >= 1, "pso.stall_iters", "must be >= 1");
    check(cfg.stall_tol >= 0.0, "pso.stall_tol", "must be >= 0");
    check(cfg.v_max_frac > 0.0, "pso.v_max_frac", "must be > 0");
    check(cfg.scale_lo > 0.0, "pso.scale_lo", "must be > 0");
    check(cfg.scale_hi > cfg.scale_lo, "pso.scale_hi", "must be > pso.scale_lo");
    check(cfg.k_lo > 0.0, "pso.k_lo", "must be > 0");
    check(cfg.k_hi > cfg.k_lo, "pso.k_hi", "must be > pso.k_lo");

    check(cfg.dt > 0.0, "sim.dt", "must be > 0");
    check(cfg.t_final >= cfg.dt, "sim.t_final", "must be >= sim.dt");
    check(cfg.log_every >= 1, "sim.log_every", "must be >= 1");
    check(std::abs(cfg.x0) < cfg.plant.l, "sim.x0", "|x0| must be < plant.l");
    check(cfg.P1_0 >= cfg.plant.P_min, "sim.P1_0", "must be >= plant.P_min");
    check(cfg.P2_0 >= cfg.plant.P_min, "sim.P2_0", "must be >= plant.P_min");
    check(cfg.dist_amp >= 0.0, "sim.dist_amp", "must be >= 0");
    check(cfg.dist_freq >= 0.0, "sim.dist_freq", "must be >= 0");

    check(std::isfinite(cfg.y0), "trajectory.y0", "must be finite");
    check(std::isfinite(cfg.y1), "trajectory.y1", "must be finite");
    check(!cfg.out_dir.empty(), "output.dir", "must not be empty");
}

std::string to_ini(const ExperimentConfig& cfg) {
    std::string out;
    std::string section;
    for (const auto& k : config_schema()) {
        if (!k.persist) continue;
        if (k.section != section) {
            if (!out.empty()) out += "\n";
            out += "[" + k.section + "]\n";
            section = k.section;
        }
        out += k.key + " = " + k.format(cfg) + "\n";
    }
    return out;
}

std::string config_reference() {
    const ExperimentConfig defaults;
    std::string out;
    std::string section;
    for (const auto& k : config_schema()) {
        if (k.section != section) {
            if (!out.empty()) out += "\n";
            out += "[" + k.section + "]\n";
            section = k.section;
        }
        out += "  " + k.key + " (default " + k.format(defaults) + "): " + k.description + "\n";
    }
    return out;
}

ExperimentSetup make_setup(const ExperimentConfig& cfg) {
    validate_config(cfg);

    ExperimentSetup s;
    s.plant = cfg.plant;
    s.sim = SimConfig{cfg.dt,
                      cfg.t_final,
                      cfg.log_every,
                      PlantState{cfg.x0, cfg.v0, cfg.P1_0, cfg.P2_0},
                      DisturbanceSpec{cfg.dist_amp, cfg.dist_freq}};
    s.trajectory = TrajectorySpec{cfg.y0, cfg.y1, cfg.t_final};

    ControllerConfig cc;
    cc.n = 2;
    cc.K = cfg.K;
    cc.P = {cfg.p_gain, 0.0, 0.0, cfg.p_gain};
    cc.gamma_f = cfg.gamma_f;
    cc.gamma_g = cfg.gamma_g;
    cc.g_min = cfg.g_min;
    cc.u_max = cfg.u_max;
    cc.theta_f_bound = cfg.theta_f_bound;
    cc.theta_g_lo = cfg.theta_g_lo;
    cc.theta_g_hi = cfg.theta_g_hi;
    cc.validate();

    CandidateEncoding enc;
    enc.base_config = std::move(cc);
    enc.inputs = {InputVarDef{"y", cfg.y_lo, cfg.y_hi}, InputVarDef{"de", cfg.de_lo, cfg.de_hi}};
    enc.input_mfs = cfg.input_mfs;
    enc.output_mfs = cfg.output_mfs;
    enc.base_theta_f = broadcast(cfg.theta_f_init, enc.theta_dim());
    enc.base_theta_g = broadcast(cfg.theta_g_init, enc.theta_dim());
    enc.tune_theta_f = cfg.tune_theta_f;
    enc.tune_theta_g = cfg.tune_theta_g;
    enc.tune_scales = cfg.tune_scales;
    enc.tune_K = cfg.tune_K;
    enc.scale_bounds = Interval{cfg.scale_lo, cfg.scale_hi};
    enc.k_bounds = Interval{cfg.k_lo, cfg.k_hi};
    enc.validate();

    PsoConfig pso;
    pso.n_particles = cfg.particles;
    pso.dims = enc.dims();
    pso.w = cfg.w;
    pso.c1 = cfg.c1;
    pso.c2 = cfg.c2;
    pso.bounds = enc.bounds();
    pso.max_iters = cfg.max_iters;
    pso.stall_iters = cfg.stall_iters;
    pso.stall_tol = cfg.stall_tol;
    pso.seed = cfg.seed;
    pso.workers = cfg.workers;
    pso.v_max.reserve(pso.bounds.size());
    for (const auto& b : pso.bounds) pso.v_max.push_back(cfg.v_max_frac * (b.hi - b.lo));

    s.encoding = std::move(enc);
    s.pso = std::move(pso);
    return s;
}

ExperimentConfig fold_candidate(const ExperimentConfig& cfg, const CandidateEncoding& encoding,
                                std::span<const double> candidate) {
    const ControllerSetup best = encoding.decode(candidate);
    ExperimentConfig out = cfg;
    out.K = best.config.K;
    out.theta_f_init = best.init_state.theta_f.values;
    out.theta_g_init = best.init_state.theta_g.values;
    const auto& vars = best.rules_f.input_vars();
    out.y_lo = vars[0].lo;
    out.y_hi = vars[0].hi;
    out.de_lo = vars[1].lo;
    out.de_hi = vars[1].hi;
    return out;
}

}  // namespace servo
