// MPS writer/reader. Names are fixed 8-character fields at the classic
// column positions; numeric fields are written with %.17g so that a
// write/read round trip reproduces every coefficient bit for bit (the value
// field may run past the historical 12-character width, which free-format
// readers accept).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "battmdp/lp_core.hpp"

namespace battmdp::lp {

namespace {

std::string row_name(int r) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "R%07d", r);
    return buf;
}

std::string col_name(int c) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "C%07d", c);
    return buf;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void entry(std::ostream& out, const std::string& name1, const std::string& name2,
           double value) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "    %-8s  %-8s  %s", name1.c_str(), name2.c_str(),
                  num(value).c_str());
    out << buf << '\n';
}

struct RowKind {
    char type;       // 'E', 'L', 'G'
    double rhs;
    double range;    // 0 when absent
    bool has_range;
};

RowKind classify(double lo, double hi) {
    if (lo == hi) return {'E', lo, 0.0, false};
    if (lo == -inf && hi == inf) return {'L', inf, 0.0, false};  // written as free-ish L
    if (lo == -inf) return {'L', hi, 0.0, false};
    if (hi == inf) return {'G', lo, 0.0, false};
    return {'L', hi, hi - lo, true};
}

}  // namespace

void export_mps(const LpProblem& problem, const std::string& path, const std::string& name) {
    problem.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);

    out << "NAME          " << name << '\n';
    out << "ROWS\n";
    out << " N  OBJ\n";
    std::vector<RowKind> kinds(problem.num_rows());
    for (int r = 0; r < problem.num_rows(); ++r) {
        kinds[r] = classify(problem.row_lower(r), problem.row_upper(r));
        const bool free_row = problem.row_lower(r) == -inf && problem.row_upper(r) == inf;
        out << ' ' << (free_row ? 'N' : kinds[r].type) << "  " << row_name(r) << '\n';
    }

    // transpose rows to columns
    std::vector<std::vector<std::pair<int, double>>> cols(problem.num_vars());
    for (int r = 0; r < problem.num_rows(); ++r) {
        const auto idx = problem.row_indices(r);
        const auto val = problem.row_values(r);
        for (std::size_t t = 0; t < idx.size(); ++t) cols[idx[t]].emplace_back(r, val[t]);
    }

    out << "COLUMNS\n";
    for (int c = 0; c < problem.num_vars(); ++c) {
        if (problem.objective_coeff(c) != 0.0 || cols[c].empty()) {
            entry(out, col_name(c), "OBJ", problem.objective_coeff(c));
        }
        for (const auto& [r, v] : cols[c]) entry(out, col_name(c), row_name(r), v);
    }

    out << "RHS\n";
    for (int r = 0; r < problem.num_rows(); ++r) {
        if (kinds[r].rhs != 0.0 && std::isfinite(kinds[r].rhs)) {
            entry(out, "RHS", row_name(r), kinds[r].rhs);
        }
    }

    bool any_range = false;
    for (const auto& k : kinds) any_range |= k.has_range;
    if (any_range) {
        out << "RANGES\n";
        for (int r = 0; r < problem.num_rows(); ++r) {
            if (kinds[r].has_range) entry(out, "RNG", row_name(r), kinds[r].range);
        }
    }

    out << "BOUNDS\n";
    for (int c = 0; c < problem.num_vars(); ++c) {
        const double lo = problem.lower_bound(c), hi = problem.upper_bound(c);
        if (problem.is_binary(c)) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), " BV %-8s  %-8s", "BND", col_name(c).c_str());
            out << buf << '\n';
            continue;
        }
        if (lo == 0.0 && hi == inf) continue;  // default bound
        auto bound = [&](const char* type, double v, bool with_value) {
            char buf[128];
            if (with_value) {
                std::snprintf(buf, sizeof(buf), " %s %-8s  %-8s  %s", type, "BND",
                              col_name(c).c_str(), num(v).c_str());
            } else {
                std::snprintf(buf, sizeof(buf), " %s %-8s  %-8s", type, "BND",
                              col_name(c).c_str());
            }
            out << buf << '\n';
        };
        if (lo == hi) {
            bound("FX", lo, true);
        } else if (lo == -inf && hi == inf) {
            bound("FR", 0.0, false);
        } else {
            if (lo != 0.0) {
                if (lo == -inf) bound("MI", 0.0, false);
                else bound("LO", lo, true);
            }
            if (hi != inf) bound("UP", hi, true);
        }
    }
    out << "ENDATA\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

LpProblem import_mps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    enum Section { None, Rows, Columns, Rhs, Ranges, Bounds, Done } section = None;
    LpProblem p;
    std::map<std::string, int> row_ids;     // structural rows only
    std::map<std::string, int> col_ids;
    std::string obj_row;
    std::vector<char> row_type;
    std::vector<double> row_rhs, row_range;
    std::vector<bool> row_has_range;
    struct ColData {
        double obj = 0.0;
        double lo = 0.0, hi = inf;
        bool binary = false;
        bool lo_set = false, hi_set = false;
        std::vector<std::pair<int, double>> entries;
    };
    std::vector<ColData> cols;

    auto get_col = [&](const std::string& name) {
        auto [it, inserted] = col_ids.try_emplace(name, static_cast<int>(cols.size()));
        if (inserted) cols.emplace_back();
        return it->second;
    };

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        if (line[0] != ' ') {
            std::istringstream hs(line);
            std::string head;
            hs >> head;
            if (head == "NAME") section = None;
            else if (head == "ROWS") section = Rows;
            else if (head == "COLUMNS") section = Columns;
            else if (head == "RHS") section = Rhs;
            else if (head == "RANGES") section = Ranges;
            else if (head == "BOUNDS") section = Bounds;
            else if (head == "ENDATA") { section = Done; break; }
            else throw std::runtime_error("unknown MPS section: " + head);
            continue;
        }
        std::istringstream fs(line);
        if (section == Rows) {
            std::string type, rname;
            fs >> type >> rname;
            if (type == "N") {
                if (obj_row.empty()) obj_row = rname;
                // additional free rows are ignored as constraints
                continue;
            }
            row_ids[rname] = static_cast<int>(row_type.size());
            row_type.push_back(type[0]);
            row_rhs.push_back(0.0);
            row_range.push_back(0.0);
            row_has_range.push_back(false);
        } else if (section == Columns) {
            std::string cname, rname;
            double v;
            fs >> cname;
            const int c = get_col(cname);
            while (fs >> rname >> v) {
                if (rname == obj_row) {
                    cols[c].obj = v;
                } else {
                    auto it = row_ids.find(rname);
                    if (it == row_ids.end()) throw std::runtime_error("unknown row " + rname);
                    cols[c].entries.emplace_back(it->second, v);
                }
            }
        } else if (section == Rhs) {
            std::string setname, rname;
            double v;
            fs >> setname;
            while (fs >> rname >> v) {
                if (rname == obj_row) continue;
                auto it = row_ids.find(rname);
                if (it == row_ids.end()) throw std::runtime_error("unknown RHS row " + rname);
                row_rhs[it->second] = v;
            }
        } else if (section == Ranges) {
            std::string setname, rname;
            double v;
            fs >> setname;
            while (fs >> rname >> v) {
                auto it = row_ids.find(rname);
                if (it == row_ids.end()) throw std::runtime_error("unknown RANGES row " + rname);
                row_range[it->second] = v;
                row_has_range[it->second] = true;
            }
        } else if (section == Bounds) {
            std::string type, setname, cname;
            fs >> type >> setname >> cname;
            const int c = get_col(cname);
            double v = 0.0;
            if (type == "LO" || type == "UP" || type == "FX" || type == "BV" ||
                type == "MI" || type == "PL" || type == "FR") {
                if (type == "LO" || type == "UP" || type == "FX") fs >> v;
                if (type == "LO") { cols[c].lo = v; cols[c].lo_set = true; }
                else if (type == "UP") { cols[c].hi = v; cols[c].hi_set = true; }
                else if (type == "FX") { cols[c].lo = cols[c].hi = v; cols[c].lo_set = cols[c].hi_set = true; }
                else if (type == "FR") { cols[c].lo = -inf; cols[c].hi = inf; }
                else if (type == "MI") { cols[c].lo = -inf; }
                else if (type == "PL") { cols[c].hi = inf; }
                else if (type == "BV") { cols[c].lo = 0.0; cols[c].hi = 1.0; cols[c].binary = true; }
            } else {
                throw std::runtime_error("unsupported bound type " + type);
            }
        }
    }

    for (const auto& cd : cols) p.add_variable(cd.lo, cd.hi, cd.obj);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c].binary) p.set_binary(static_cast<int>(c));
    }

    // rows, in declaration order, transposed back from columns
    const int m = static_cast<int>(row_type.size());
    std::vector<std::vector<int>> ridx(m);
    std::vector<std::vector<double>> rval(m);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (const auto& [r, v] : cols[c].entries) {
            ridx[r].push_back(static_cast<int>(c));
            rval[r].push_back(v);
        }
    }
    for (int r = 0; r < m; ++r) {
        double lo, hi;
        const double rhs = row_rhs[r];
        switch (row_type[r]) {
            case 'E': lo = hi = rhs; break;
            case 'L': lo = -inf; hi = rhs; break;
            case 'G': lo = rhs; hi = inf; break;
            default: throw std::runtime_error("bad row type");
        }
        if (row_has_range[r]) {
            const double rng = row_range[r];
            // standard MPS range semantics
            if (row_type[r] == 'L') lo = hi - std::abs(rng);
            else if (row_type[r] == 'G') hi = lo + std::abs(rng);
            else if (row_type[r] == 'E') {
                if (rng >= 0) hi = lo + rng;
                else lo = hi + rng;
            }
        }
        p.add_row(lo, hi, ridx[r], rval[r]);
    }
    p.validate();
    return p;
}

}  // namespace battmdp::lp
