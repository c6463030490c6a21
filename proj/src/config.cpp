#include "sdc/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace sdc {

namespace pt = boost::property_tree;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty()) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& text, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) fail("malformed number '" + text + "' for " + where);
        return v;
    } catch (const std::logic_error&) {
        fail("malformed number '" + text + "' for " + where);
    }
}

class Section {
public:
    Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
        if (auto child = root.get_child_optional(name_)) tree_ = *child;
    }

    bool has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

    std::string raw(const std::string& key) const {
        auto v = tree_.get_optional<std::string>(key);
        if (!v) fail("missing key '" + key + "' in section [" + name_ + "]");
        return trim(*v);
    }

    double number(const std::string& key) const { return to_double(raw(key), where(key)); }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    int integer(const std::string& key) const {
        const double v = number(key);
        if (v != std::floor(v)) fail("expected an integer for " + where(key));
        return static_cast<int>(v);
    }
    int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

    std::string text(const std::string& key, const std::string& fallback) const {
        return has(key) ? raw(key) : fallback;
    }

    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string v = raw(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail("expected true/false for " + where(key));
    }

    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        for (const auto& item : split_list(raw(key))) out.push_back(to_double(item, where(key)));
        return out;
    }

    std::string where(const std::string& key) const { return "'" + key + "' in section [" + name_ + "]"; }

private:
    std::string name_;
    pt::ptree tree_;
};

void require(bool ok, const Section& s, const std::string& key, const std::string& rule) {
    if (!ok) fail(s.where(key) + ": " + rule);
}

}  // namespace

Complex parse_complex(const std::string& raw_text) {
    const std::string text = trim(raw_text);
    if (text.empty()) fail("empty complex number");
    if (text.back() != 'i' && text.back() != 'j') return {to_double(text, "complex value"), 0.0};
    const std::string body = text.substr(0, text.size() - 1);
    // split at the last sign that is not part of an exponent or the leading sign
    std::size_t cut = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            cut = i;
            break;
        }
    }
    if (cut == std::string::npos) {
        const std::string im = (body.empty() || body == "+" || body == "-") ? body + "1" : body;
        return {0.0, to_double(im, "complex value")};
    }
    std::string im = body.substr(cut);
    if (im == "+" || im == "-") im += "1";
    return {to_double(body.substr(0, cut), "complex value"), to_double(im, "complex value")};
}

RunConfig parse_config(std::istream& in) {
    pt::ptree root;
    try {
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        fail(std::string("cannot parse config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    RunConfig cfg;
    const Section plant(root, "plant");
    cfg.plant.a = plant.number("a");
    cfg.plant.c = plant.number("c");
    cfg.plant.length = plant.number("L");
    cfg.plant.n_max = plant.integer("N_max", 10);
    require(cfg.plant.a > 0.0, plant, "a", "must be positive");
    require(cfg.plant.length > 0.0, plant, "L", "must be positive");
    require(cfg.plant.n_max >= 1, plant, "N_max", "must be at least 1");

    const Section trunc(root, "truncation");
    cfg.n0 = trunc.integer("N0");
    require(cfg.n0 >= 0 && cfg.n0 < cfg.plant.n_max, trunc, "N0", "must satisfy 0 <= N0 < N_max");

    const Section control(root, "control");
    cfg.control.delay = control.number("D");
    cfg.control.t0 = control.number("t0");
    require(cfg.control.delay > 0.0, control, "D", "must be positive");
    require(cfg.control.t0 > 0.0, control, "t0", "must be positive");
    for (const auto& item : split_list(control.raw("poles"))) cfg.control.poles.push_back(parse_complex(item));
    require(static_cast<int>(cfg.control.poles.size()) == std::max(cfg.n0, 1) || cfg.n0 == 0, control, "poles",
            "need exactly N0 entries");

    const std::string placement = control.text("placement", "rank-one");
    require(placement == "rank-one" || placement == "exact", control, "placement", "must be rank-one or exact");
    cfg.control.placement = placement == "exact" ? Placement::Exact : Placement::RankOne;

    const Section cert(root, "certificate");
    cfg.certificate.optimize = cert.flag("optimize", !(cert.has("beta") || cert.has("gamma1") || cert.has("gamma2")));
    if (!cfg.certificate.optimize) {
        cfg.certificate.beta = cert.number("beta");
        cfg.certificate.gamma1 = cert.number("gamma1");
        cfg.certificate.gamma2 = cert.number("gamma2");
        require(cfg.certificate.beta > 0.0 && cfg.certificate.beta < 1.0, cert, "beta", "must lie in (0, 1)");
        require(cfg.certificate.gamma1 > 0.0, cert, "gamma1", "must be positive");
        require(cfg.certificate.gamma2 > 0.0, cert, "gamma2", "must be positive");
    }

    const Section coupling(root, "coupling");
    auto& cp = cfg.coupling;
    cp.a1 = coupling.number("a1", cp.a1);
    cp.b1 = coupling.number("b1", cp.b1);
    cp.c1 = coupling.number("c1", cp.c1);
    cp.a2 = coupling.number("a2", cp.a2);
    cp.b2 = coupling.number("b2", cp.b2);
    cp.c2 = coupling.number("c2", cp.c2);
    cp.d2 = coupling.number("d2", cp.d2);
    require(cp.a1 > 0.0, coupling, "a1", "must be positive");
    cfg.disturbance = coupling.text("disturbance", cfg.disturbance);
    require(cfg.disturbance == "none" || cfg.disturbance == "case-study" || cfg.disturbance == "samples", coupling,
            "disturbance", "must be one of none, case-study, samples");
    if (cfg.disturbance == "samples") {
        cfg.disturbance_times = coupling.numbers("disturbance_times");
        cfg.disturbance_values = coupling.numbers("disturbance_values");
        require(!cfg.disturbance_times.empty() && cfg.disturbance_times.size() == cfg.disturbance_values.size(),
                coupling, "disturbance_values", "must match disturbance_times in length");
    }

    const Section sim(root, "simulation");
    auto& s = cfg.simulation;
    s.dt = sim.number("dt", s.dt);
    s.t_end = sim.number("T_end", s.t_end);
    s.n_modes = sim.integer("N_modes", std::min(s.n_modes, cfg.plant.n_max));
    s.record_stride = sim.integer("record_stride", s.record_stride);
    s.output = sim.text("output", s.output);
    s.x0 = sim.number("x0", s.x0);
    s.initial_profile = sim.text("initial_profile", s.initial_profile);
    require(s.dt > 0.0, sim, "dt", "must be positive");
    require(s.dt < cfg.control.delay, sim, "dt", "must be smaller than the delay D");
    require(s.t_end >= 0.0, sim, "T_end", "must be nonnegative");
    require(s.n_modes >= cfg.n0 && s.n_modes <= cfg.plant.n_max, sim, "N_modes", "must satisfy N0 <= N_modes <= N_max");
    require(s.record_stride >= 1, sim, "record_stride", "must be positive");
    require(s.initial_profile == "cubic" || s.initial_profile == "zero", sim, "initial_profile",
            "must be cubic or zero");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'");
    return parse_config(in);
}

RunConfig case_study_config() {
    RunConfig cfg;
    cfg.plant = {5.0, 2.5, 2.0 * std::numbers::pi, 10};
    cfg.n0 = 2;
    cfg.control.delay = 0.1;
    cfg.control.t0 = 0.2;
    cfg.control.poles = {Complex(-3.0), Complex(-3.0)};
    cfg.certificate.optimize = true;
    cfg.coupling = CouplingParameters{};
    cfg.disturbance = "case-study";
    cfg.simulation = RunConfig::Simulation{};
    return cfg;
}

}  // namespace sdc
