#include "inktrace/params.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace inktrace {

namespace {

struct Field {
    const char* key;
    std::function<double&(ParamSet&)> ref;
};

// Canonical field order; save() emits exactly this.
const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        {"retrace_pi_max", [](ParamSet& p) -> double& { return p.retrace_pi_max; }},
        {"retrace_ep_dist", [](ParamSet& p) -> double& { return p.retrace_ep_dist; }},
        {"retrace_curv_max", [](ParamSet& p) -> double& { return p.retrace_curv_max; }},
        {"tpattern_tol_pct", [](ParamSet& p) -> double& { return p.tpattern_tol_pct; }},
        {"tpattern_pi_max", [](ParamSet& p) -> double& { return p.tpattern_pi_max; }},
        {"tpattern_min_dist", [](ParamSet& p) -> double& { return p.tpattern_min_dist; }},
        {"coupled_shared_max", [](ParamSet& p) -> double& { return p.coupled_shared_max; }},
        {"coupled_pi_max", [](ParamSet& p) -> double& { return p.coupled_pi_max; }},
        {"branch_window", [](ParamSet& p) -> double& { return p.branch_window; }},
        {"brotherhood_dist", [](ParamSet& p) -> double& { return p.brotherhood_dist; }},
        {"curvature_samples", [](ParamSet& p) -> double& { return p.curvature_samples; }},
        {"normal.ext", [](ParamSet& p) -> double& { return p.normal.ext; }},
        {"normal.int", [](ParamSet& p) -> double& { return p.normal.inte; }},
        {"normal.cur", [](ParamSet& p) -> double& { return p.normal.cur; }},
        {"t_retrace.ext", [](ParamSet& p) -> double& { return p.t_retrace.ext; }},
        {"t_retrace.int", [](ParamSet& p) -> double& { return p.t_retrace.inte; }},
        {"t_retrace.cur", [](ParamSet& p) -> double& { return p.t_retrace.cur; }},
        {"coupled.ext", [](ParamSet& p) -> double& { return p.coupled.ext; }},
        {"coupled.int", [](ParamSet& p) -> double& { return p.coupled.inte; }},
        {"coupled.cur", [](ParamSet& p) -> double& { return p.coupled.cur; }},
        {"odd_rank.ext", [](ParamSet& p) -> double& { return p.odd_rank.ext; }},
        {"odd_rank.int", [](ParamSet& p) -> double& { return p.odd_rank.inte; }},
        {"odd_rank.cur", [](ParamSet& p) -> double& { return p.odd_rank.cur; }},
        {"start_mean_row_frac", [](ParamSet& p) -> double& { return p.start_mean_row_frac; }},
        {"start_mean_col_frac", [](ParamSet& p) -> double& { return p.start_mean_col_frac; }},
        {"start_sigma_row_frac", [](ParamSet& p) -> double& { return p.start_sigma_row_frac; }},
        {"start_sigma_col_frac", [](ParamSet& p) -> double& { return p.start_sigma_col_frac; }},
    };
    return f;
}

double parse_number(const std::string& text, const std::string& where) {
    try {
        size_t used = 0;
        double v = std::stod(text, &used);
        while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad number '" + text + "' " + where);
    }
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string format_number(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

}  // namespace

double ParamSet::delta(int k) const {
    ParamSet& self = const_cast<ParamSet&>(*this);
    if (k < 1 || k > 11) throw std::invalid_argument("delta index must be 1..11");
    return fields()[k - 1].ref(self);
}

void ParamSet::set_delta(int k, double value) {
    if (k < 1 || k > 11) throw std::invalid_argument("delta index must be 1..11");
    fields()[k - 1].ref(*this) = value;
}

void ParamSet::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(retrace_pi_max, "retrace_pi_max");
    positive(retrace_ep_dist, "retrace_ep_dist");
    positive(retrace_curv_max, "retrace_curv_max");
    positive(tpattern_tol_pct, "tpattern_tol_pct");
    positive(tpattern_pi_max, "tpattern_pi_max");
    positive(tpattern_min_dist, "tpattern_min_dist");
    positive(coupled_shared_max, "coupled_shared_max");
    positive(coupled_pi_max, "coupled_pi_max");
    if (branch_window < 3) throw std::invalid_argument("branch_window must be at least 3");
    positive(brotherhood_dist, "brotherhood_dist");
    if (curvature_samples < 3) throw std::invalid_argument("curvature_samples must be at least 3");
    for (const WeightRow* row : {&normal, &t_retrace, &coupled, &odd_rank}) {
        if (row->ext < 0 || row->inte < 0 || row->cur < 0)
            throw std::invalid_argument("weight rows must be non-negative");
        if (std::abs(row->ext + row->inte + row->cur - 1.0) > 1e-9)
            throw std::invalid_argument("weight rows must sum to 1");
    }
    for (double v : {start_sigma_row_frac, start_sigma_col_frac})
        if (!(v > 0)) throw std::invalid_argument("start sigma fractions must be positive");
}

ParamSet ParamSet::load(const std::string& text) {
    ParamSet p;
    std::map<std::string, bool> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        if (seen[key])
            throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate key '" +
                                        key + "'");
        seen[key] = true;
        try {
            p.set(t);  // files take the same spellings the command line does
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    p.validate();
    return p;
}

ParamSet ParamSet::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load(ss.str());
}

std::string ParamSet::save() const {
    ParamSet& self = const_cast<ParamSet&>(*this);
    std::string out;
    for (const Field& f : fields()) {
        out += f.key;
        out += '=';
        out += format_number(f.ref(self));
        out += '\n';
    }
    return out;
}

void ParamSet::set(const std::string& assignment) {
    size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("expected key=value, got '" + assignment + "'");
    std::string key = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));

    // deltaK and the UTF-8 Greek spelling both address fields by 1-based index.
    std::string index_part;
    if (key.rfind("delta", 0) == 0)
        index_part = key.substr(5);
    else if (key.rfind("\xce\xb4", 0) == 0)
        index_part = key.substr(2);
    if (!index_part.empty() &&
        index_part.find_first_not_of("0123456789") == std::string::npos) {
        int k = std::stoi(index_part);
        set_delta(k, parse_number(value, "for " + key));
        return;
    }
    // Weight rows may be written with an omega prefix (omega_normal.ext etc.).
    for (const std::string prefix : {"\xcf\x89_", "omega_", "w_"})
        if (key.rfind(prefix, 0) == 0) {
            key = key.substr(prefix.size());
            break;
        }
    for (const Field& f : fields()) {
        if (key == f.key) {
            f.ref(*this) = parse_number(value, "for " + key);
            return;
        }
    }
    throw std::invalid_argument("unknown parameter '" + key + "'");
}

std::string ParamSet::hash() const {
    std::string dump = save();
    if (coupled_use_min) dump += "coupled_use_min=1\n";  // knob changes behaviour, so hash it
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream ss;
    ss << std::hex << std::nouppercase;
    ss.width(16);
    ss.fill('0');
    ss << h;
    return ss.str();
}

std::array<double, 2> sweep_range(int k) {
    switch (k) {
        case 1: return {22, 34};
        case 2: return {10, 30};
        case 3: return {10, 30};
        case 4: return {1, 5};
        case 5: return {16, 22};
        case 6: return {4, 12};
        case 7: return {46, 56};
        case 8: return {20, 60};
        case 9: return {3, 7};
        case 10: return {6, 14};
        case 11: return {6, 14};
        default: throw std::invalid_argument("delta index must be 1..11");
    }
}

}  // namespace inktrace
