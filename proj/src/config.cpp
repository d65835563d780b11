#include "lgkin/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lgkin/grid.hpp"

namespace lgkin {

namespace {
std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(trim(tok)));
    return out;
}
}  // namespace

std::vector<Vec2> parse_k_list(const std::string& text) {
    std::vector<Vec2> out;
    std::istringstream ss(text);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        pair = trim(pair);
        if (pair.empty()) continue;
        std::size_t comma = pair.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("bad k entry: " + pair);
        out.push_back({std::stod(trim(pair.substr(0, comma))),
                       std::stod(trim(pair.substr(comma + 1)))});
    }
    if (out.empty()) throw std::invalid_argument("empty k list");
    return out;
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text,
                                               const std::string& origin) {
    ExperimentConfig c;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        try {
            if (key == "n_theta")
                c.n_theta = std::stoul(val);
            else if (key == "n_s")
                c.n_s = std::stoul(val);
            else if (key == "n_h")
                c.n_h = std::stoul(val);
            else if (key == "s_max")
                c.s_max = std::stod(val);
            else if (key == "T")
                c.T = std::stod(val);
            else if (key == "dt")
                c.dt = std::stod(val);
            else if (key == "init")
                c.init = val;
            else if (key == "init_file")
                c.init_file = val;
            else if (key == "k_list")
                c.k_list = parse_k_list(val);
            else if (key == "mode_n_theta")
                c.mode_n_theta = std::stoul(val);
            else if (key == "mc_particles")
                c.mc_particles = std::stoul(val);
            else if (key == "seed")
                c.seed = std::stoull(val);
            else if (key == "snapshot_times")
                c.snapshot_times = parse_list(val);
            else if (key == "sigma")
                c.sigma = std::stod(val);
            else if (key == "out_dir")
                c.out_dir = val;
            else if (key == "norms")
                c.norms = val;
            else
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": bad value for '" + key + "'");
        }
    }
    if (c.init != "equilibrium" && c.init != "cosine" && c.init != "custom-file")
        throw std::runtime_error(origin + ": unknown init kind '" + c.init + "'");
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return from_string(buf.str(), path);
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    std::map<std::string, std::string> e;
    auto num = [](double v) {
        char b[40];
        std::snprintf(b, sizeof b, "%.17g", v);
        return std::string(b);
    };
    e["n_theta"] = std::to_string(n_theta);
    e["n_s"] = std::to_string(n_s);
    e["n_h"] = std::to_string(n_h);
    e["s_max"] = num(s_max);
    e["T"] = num(T);
    e["dt"] = num(dt);
    e["init"] = init;
    if (!init_file.empty()) e["init_file"] = init_file;
    std::string ks;
    for (const auto& k : k_list) ks += num(k.x) + "," + num(k.y) + ";";
    e["k_list"] = ks;
    e["mode_n_theta"] = std::to_string(mode_n_theta);
    e["mc_particles"] = std::to_string(mc_particles);
    e["seed"] = std::to_string(seed);
    std::string st;
    for (double t : snapshot_times) st += num(t) + ",";
    e["snapshot_times"] = st;
    e["sigma"] = num(sigma);
    e["out_dir"] = out_dir;
    e["norms"] = norms;
    return e;
}

bool RunManifest::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["version"] = version;
    j["command"] = command;
    j["config"] = config_echo;
    j["wall_clock_sec"] = wall_clock_sec;
    j["constants"] = constants;
    j["all_pass"] = all_pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json jc;
        jc["name"] = c.name;
        jc["measured"] = c.measured;
        jc["threshold"] = c.threshold;
        jc["relation"] = c.relation;
        jc["pass"] = c.pass;
        if (!c.detail.empty()) jc["detail"] = c.detail;
        j["checks"].push_back(jc);
    }
    return j.dump(2);
}

void write_manifest(const std::string& path, const RunManifest& m) {
    atomic_write_text(path, m.to_json() + "\n");
}

}  // namespace lgkin
