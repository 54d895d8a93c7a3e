#include "invfilter/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "invfilter/experiment.hpp"

namespace invfilter {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Experiment parse_experiment(const std::string& v) {
    if (v == "single_run") return Experiment::single_run;
    if (v == "rate_study_dm1") return Experiment::rate_study_dm1;
    if (v == "rate_study_dm2") return Experiment::rate_study_dm2;
    if (v == "diagonal_minimax") return Experiment::diagonal_minimax;
    if (v == "variant_blowup") return Experiment::variant_blowup;
    if (v == "oracle_suite") return Experiment::oracle_suite;
    throw std::invalid_argument("unknown experiment: " + v);
}

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::single_run: return "single_run";
        case Experiment::rate_study_dm1: return "rate_study_dm1";
        case Experiment::rate_study_dm2: return "rate_study_dm2";
        case Experiment::diagonal_minimax: return "diagonal_minimax";
        case Experiment::variant_blowup: return "variant_blowup";
        case Experiment::oracle_suite: return "oracle_suite";
    }
    return "?";
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("bad numeric value for " + key + ": " + v);
    return d;
}

int to_int(const std::string& key, const std::string& v) {
    double d = to_double(key, v);
    if (d != std::floor(d)) throw std::invalid_argument("expected integer for " + key + ": " + v);
    return static_cast<int>(d);
}

} // namespace

int stop_index_for_noise_label(const std::string& label) {
    if (label == "1%") return 20;
    if (label == "2.5%") return 6;
    if (label == "5%") return 3;
    throw std::invalid_argument(
        "noise preset must be one of 1%, 2.5%, 5% (use gamma= or rho= for other levels)");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (!seen.insert(key).second)
            throw std::invalid_argument("config: duplicate key " + key);

        if (key == "experiment") c.experiment = parse_experiment(val);
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(std::stoull(val));
        else if (key == "output_dir") c.output_dir = val;
        else if (key == "threads") c.threads = to_int(key, val);
        else if (key == "coarse_n") c.coarse_n = to_int(key, val);
        else if (key == "fine_n") c.fine_n = to_int(key, val);
        else if (key == "s") c.s = to_double(key, val);
        else if (key == "a") c.a = to_double(key, val);
        else if (key == "data_model") {
            if (val == "dm1") c.data_model = DataModel::dm1;
            else if (val == "dm2") c.data_model = DataModel::dm2;
            else throw std::invalid_argument("data_model must be dm1 or dm2");
        }
        else if (key == "gamma") c.gamma = to_double(key, val);
        else if (key == "rho") c.rho = to_double(key, val);
        else if (key == "noise") c.noise = val;
        else if (key == "budget_n") c.budget_n = to_int(key, val);
        else if (key == "steps") c.steps = to_int(key, val);
        else if (key == "alpha") c.alpha = to_double(key, val);
        else if (key == "filter") c.filter = val;
        else if (key == "s_list") {
            c.s_list.clear();
            for (const auto& item : split_list(val)) c.s_list.push_back(to_double(key, item));
        }
        else if (key == "N_list") {
            c.N_list.clear();
            for (const auto& item : split_list(val)) c.N_list.push_back(to_int(key, item));
        }
        else if (key == "replicates") c.replicates = to_int(key, val);
        else if (key == "modes") c.modes = to_int(key, val);
        else if (key == "beta") c.beta = to_double(key, val);
        else if (key == "eps") c.eps = to_double(key, val);
        else if (key == "p") c.p = to_double(key, val);
        else if (key == "diag_gamma") c.diag_gamma = to_double(key, val);
        else if (key == "variant_alpha") c.variant_alpha = to_double(key, val);
        else if (key == "variant_q") c.variant_q = to_double(key, val);
        else throw std::invalid_argument("config: unknown key " + key);
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ProblemSpec RunConfig::to_problem_spec() const {
    ProblemSpec spec;
    spec.coarse_n = coarse_n;
    spec.fine_n = fine_n;
    spec.s = s;
    spec.a = a;
    spec.data_model = data_model;
    spec.budget_n = budget_n;
    spec.seed = seed;
    if (noise) {
        int N = stop_index_for_noise_label(*noise);
        spec.gamma = gamma_for_stop_index(N, s, a);
    } else if (gamma) {
        spec.gamma = gamma;
    } else if (rho) {
        spec.rho = rho;
    }
    // else: per-experiment defaults are applied by the runner (5% reference
    // level for single runs, 5e-4 for the DM1 rate study, per-N coupling
    // for the DM2 rate study).
    if (alpha > 0.0) spec.alpha_rule = {AlphaRule::Kind::fixed, alpha, 0.5};
    if (experiment == Experiment::variant_blowup)
        spec.alpha_rule = {AlphaRule::Kind::variant_geometric, variant_alpha, variant_q};
    return spec;
}

std::vector<FilterKind> RunConfig::filter_kinds() const {
    if (filter == "kalman") return {FilterKind::kalman};
    if (filter == "threedvar") return {FilterKind::threedvar};
    if (filter == "variant") return {FilterKind::variant};
    if (filter == "both") return {FilterKind::kalman, FilterKind::threedvar};
    throw std::invalid_argument("filter must be kalman, threedvar, variant or both");
}

std::string RunConfig::to_text() const {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "experiment = " << experiment_name(experiment) << "\n";
    out << "seed = " << seed << "\n";
    out << "output_dir = " << output_dir << "\n";
    out << "threads = " << threads << "\n";
    out << "coarse_n = " << coarse_n << "\n";
    out << "fine_n = " << fine_n << "\n";
    out << "s = " << num(s) << "\n";
    out << "a = " << num(a) << "\n";
    out << "data_model = " << (data_model == DataModel::dm1 ? "dm1" : "dm2") << "\n";
    if (noise) out << "noise = " << *noise << "\n";
    else if (gamma) out << "gamma = " << num(*gamma) << "\n";
    else if (rho) out << "rho = " << num(*rho) << "\n";
    out << "budget_n = " << budget_n << "\n";
    out << "steps = " << steps << "\n";
    out << "alpha = " << num(alpha) << "\n";
    out << "filter = " << filter << "\n";
    out << "s_list = ";
    for (std::size_t i = 0; i < s_list.size(); ++i) out << (i ? "," : "") << num(s_list[i]);
    out << "\n";
    out << "N_list = ";
    for (std::size_t i = 0; i < N_list.size(); ++i) out << (i ? "," : "") << N_list[i];
    out << "\n";
    out << "replicates = " << replicates << "\n";
    out << "modes = " << modes << "\n";
    out << "beta = " << num(beta) << "\n";
    out << "eps = " << num(eps) << "\n";
    out << "p = " << num(p) << "\n";
    out << "diag_gamma = " << num(diag_gamma) << "\n";
    out << "variant_alpha = " << num(variant_alpha) << "\n";
    out << "variant_q = " << num(variant_q) << "\n";
    return out.str();
}

std::string default_config_text() {
    return RunConfig{}.to_text();
}

ValidationReport validate_config(const RunConfig& c) {
    ValidationReport rep;
    if (c.experiment == Experiment::oracle_suite) return rep;

    if (c.experiment == Experiment::diagonal_minimax || c.experiment == Experiment::variant_blowup) {
        if (c.modes < 4) rep.errors.push_back("modes must be >= 4");
        if (c.beta <= 0 || c.eps <= 0 || c.p <= 0)
            rep.errors.push_back("assumption-2 parameters beta, eps, p must be positive");
        if (c.diag_gamma <= 0) rep.errors.push_back("diag_gamma must be positive");
        if (c.experiment == Experiment::variant_blowup &&
            (c.variant_q <= 0.0 || c.variant_q >= 1.0))
            rep.errors.push_back("variant schedule requires 0 < q < 1");
        if (c.replicates < 2) rep.errors.push_back("replicates must be >= 2");
        double steps = c.experiment == Experiment::variant_blowup
                           ? (c.steps > 0 ? c.steps : 40)
                           : static_cast<double>(c.N_list.empty() ? 0 : c.N_list.back());
        rep.estimated_cost = static_cast<double>(c.modes) * steps * c.replicates;
        return rep;
    }

    ProblemSpec spec = c.to_problem_spec();
    for (auto& e : spec.validate()) rep.errors.push_back(e);
    for (auto& w : spec.warnings()) rep.warnings.push_back(w);
    if (c.noise && c.gamma) rep.errors.push_back("give either noise preset or gamma, not both");
    if (c.noise) {
        try {
            stop_index_for_noise_label(*c.noise);
        } catch (const std::exception& e) {
            rep.errors.push_back(e.what());
        }
    }
    if (c.replicates < 1) rep.errors.push_back("replicates must be >= 1");
    try {
        c.filter_kinds();
    } catch (const std::exception& e) {
        rep.errors.push_back(e.what());
    }

    double modes = static_cast<double>(c.coarse_n) * c.coarse_n;
    if (c.experiment == Experiment::single_run) {
        double steps = c.steps > 0 ? c.steps : 30;
        rep.estimated_cost = 2.0 * modes * steps * c.replicates;
    } else {
        if (c.N_list.size() < 4) rep.errors.push_back("N_list needs at least 4 entries for slope fits");
        double total_steps = 0;
        for (int N : c.N_list) total_steps += N;
        rep.estimated_cost = 2.0 * modes * total_steps * c.replicates * c.s_list.size() *
                             static_cast<double>(c.filter_kinds().size());
    }
    return rep;
}

} // namespace invfilter
