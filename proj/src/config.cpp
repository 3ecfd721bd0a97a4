#include "twistspec/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace twistspec {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& s) {
    const std::string t = trim(s);
    char* endp = nullptr;
    const double v = std::strtod(t.c_str(), &endp);
    if (endp != t.c_str() + t.size() || t.empty())
        throw ConfigError("not a number: '" + t + "'");
    return v;
}

long parse_int(const std::string& s) {
    const double v = parse_double(s);
    const long i = static_cast<long>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("not an integer: '" + trim(s) + "'");
    return i;
}

bool parse_bool(const std::string& s) {
    const std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("not a boolean: '" + t + "'");
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream iss(trim(s));
    while (std::getline(iss, item, ',')) out.push_back(parse_double(item));
    return out;
}

/// Splits "name(arg1,arg2,...)" respecting nested parentheses.
bool split_call(const std::string& s, std::string& name, std::vector<std::string>& args) {
    const size_t open = s.find('(');
    if (open == std::string::npos || s.back() != ')') return false;
    name = trim(s.substr(0, open));
    const std::string body = s.substr(open + 1, s.size() - open - 2);
    args.clear();
    int depth = 0;
    std::string cur;
    for (char c : body) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            args.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || args.empty()) args.push_back(trim(cur));
    return depth == 0;
}

TwistProfile load_tabulated(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tabulated profile file: " + path);
    std::vector<double> xs, rates;
    double slope = 0.0;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        std::istringstream iss(t);
        std::string first;
        iss >> first;
        if (first == "slope") {
            std::string v;
            iss >> v;
            slope = parse_double(v);
            continue;
        }
        std::string second;
        iss >> second;
        std::string rest;
        if (iss >> rest) throw ConfigError("malformed tabulated line: " + t);
        xs.push_back(parse_double(first));
        rates.push_back(parse_double(second));
    }
    return TwistProfile::tabulated(std::move(xs), std::move(rates), slope);
}

}  // namespace

CrossSection parse_cross_section(const std::string& literal) {
    std::string name;
    std::vector<std::string> args;
    if (!split_call(trim(literal), name, args))
        throw ConfigError("malformed cross-section literal: " + literal);
    if (name == "ellipse") {
        if (args.size() != 4) throw ConfigError("ellipse expects (cx,cy,a,b)");
        return CrossSection::ellipse({parse_double(args[0]), parse_double(args[1])},
                                     parse_double(args[2]), parse_double(args[3]));
    }
    if (name == "rectangle") {
        if (args.size() != 4) throw ConfigError("rectangle expects (x0,y0,x1,y1)");
        return CrossSection::rectangle({parse_double(args[0]), parse_double(args[1])},
                                       {parse_double(args[2]), parse_double(args[3])});
    }
    if (name == "polygon") {
        std::vector<Vec2> verts;
        for (const std::string& a : args) {
            std::string pname;
            std::vector<std::string> pargs;
            std::string wrapped = a;
            if (wrapped.empty() || wrapped.front() != '(')
                throw ConfigError("polygon vertex must be (x,y): " + a);
            wrapped = "v" + wrapped;
            if (!split_call(wrapped, pname, pargs) || pargs.size() != 2)
                throw ConfigError("polygon vertex must be (x,y): " + a);
            verts.push_back({parse_double(pargs[0]), parse_double(pargs[1])});
        }
        return CrossSection::polygon(std::move(verts));
    }
    throw ConfigError("unknown cross-section kind: " + name);
}

TwistProfile parse_profile(const std::string& literal, const std::string& base_dir) {
    std::string name;
    std::vector<std::string> args;
    if (!split_call(trim(literal), name, args))
        throw ConfigError("malformed profile literal: " + literal);
    if (name == "constant") {
        if (args.size() != 1) throw ConfigError("constant expects (beta)");
        return TwistProfile::constant(parse_double(args[0]));
    }
    if (name == "linear") {
        if (args.size() != 1) throw ConfigError("linear expects (alpha)");
        return TwistProfile::linear_rate(parse_double(args[0]));
    }
    if (name == "power") {
        if (args.size() != 2) throw ConfigError("power expects (alpha,p)");
        return TwistProfile::power_rate(parse_double(args[0]), parse_double(args[1]));
    }
    if (name == "tabulated") {
        if (args.size() != 1) throw ConfigError("tabulated expects (path)");
        std::filesystem::path p(args[0]);
        if (p.is_relative() && !std::filesystem::exists(p))
            p = std::filesystem::path(base_dir) / p;
        return load_tabulated(p.string());
    }
    throw ConfigError("unknown profile kind: " + name);
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("malformed section header at line " +
                                  std::to_string(lineno));
            continue;  // headers are organizational only
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));

        if (key == "cross_section") {
            cfg.cross_section = parse_cross_section(val);
        } else if (key == "profile") {
            cfg.profile = parse_profile(val, base_dir);
        } else if (key == "h") {
            cfg.h = parse_double(val);
            if (!(cfg.h > 0)) throw ConfigError("h must be positive");
        } else if (key == "h1") {
            cfg.h1 = parse_double(val);
            if (!(cfg.h1 > 0)) throw ConfigError("h1 must be positive");
        } else if (key == "L") {
            cfg.L = parse_double(val);
            if (!(*cfg.L > 0)) throw ConfigError("L must be positive");
        } else if (key == "L_list") {
            cfg.L_list = parse_list(val);
            for (double L : cfg.L_list)
                if (!(L > 0)) throw ConfigError("L_list entries must be positive");
        } else if (key == "beta") {
            cfg.beta_list = std::vector<double>{parse_double(val)};
        } else if (key == "beta_list") {
            cfg.beta_list = parse_list(val);
        } else if (key == "n") {
            cfg.n = static_cast<int>(parse_int(val));
            if (cfg.n < 1) throw ConfigError("n must be >= 1");
        } else if (key == "n_list") {
            cfg.n_list.clear();
            for (double v : parse_list(val)) {
                if (v < 1 || v != std::floor(v))
                    throw ConfigError("n_list entries must be positive integers");
                cfg.n_list.push_back(static_cast<int>(v));
            }
        } else if (key == "k") {
            cfg.k = static_cast<int>(parse_int(val));
            if (cfg.k < 1) throw ConfigError("k must be >= 1");
        } else if (key == "tol") {
            cfg.tol = parse_double(val);
            if (!(cfg.tol > 0)) throw ConfigError("tol must be positive");
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_int(val));
        } else if (key == "max_iter") {
            cfg.max_iter = static_cast<int>(parse_int(val));
            if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1");
        } else if (key == "richardson") {
            cfg.richardson = parse_bool(val);
        } else if (key == "stations") {
            cfg.stations = parse_list(val);
        } else if (key == "slices") {
            cfg.slices = static_cast<int>(parse_int(val));
            if (cfg.slices < 2) throw ConfigError("slices must be >= 2");
        } else if (key == "boundary_samples") {
            cfg.boundary_samples = static_cast<int>(parse_int(val));
            if (cfg.boundary_samples < 3)
                throw ConfigError("boundary_samples must be >= 3");
        } else if (key == "x1_min") {
            cfg.x1_min = parse_double(val);
        } else if (key == "x1_max") {
            cfg.x1_max = parse_double(val);
        } else if (key == "horizon") {
            cfg.horizon = parse_double(val);
            if (!(cfg.horizon > 0)) throw ConfigError("horizon must be positive");
        } else if (key == "ray_tol") {
            cfg.ray_tol = parse_double(val);
            if (!(cfg.ray_tol > 0)) throw ConfigError("ray_tol must be positive");
        } else if (key == "ray_x1_samples") {
            cfg.ray_x1_samples = static_cast<int>(parse_int(val));
            if (cfg.ray_x1_samples < 1) throw ConfigError("ray_x1_samples must be >= 1");
        } else if (key == "ray_transverse") {
            cfg.ray_transverse = static_cast<int>(parse_int(val));
            if (cfg.ray_transverse < 1) throw ConfigError("ray_transverse must be >= 1");
        } else if (key == "mode") {
            if (val != "auto" && val != "thm1" && val != "thm2")
                throw ConfigError("mode must be auto, thm1 or thm2");
            cfg.mode = val;
        } else if (key == "end") {
            if (val != "dirichlet" && val != "neumann" && val != "both")
                throw ConfigError("end must be dirichlet, neumann or both");
            cfg.end = val;
        } else if (key == "include_negative_control") {
            cfg.include_negative_control = parse_bool(val);
        } else {
            throw ConfigError("unknown key '" + key + "' at line " +
                              std::to_string(lineno));
        }
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(),
                             std::filesystem::path(path).parent_path().string());
}

}  // namespace twistspec
