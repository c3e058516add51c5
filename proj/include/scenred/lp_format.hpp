#pragma once

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenred/detail/text.hpp"
#include "scenred/milp.hpp"

namespace scenred::milp {

/// Writes the model in LP text format (Minimize / Subject To / Bounds /
/// Binaries sections) with variables named x0..x{n-1} and rows c0..c{q-1}.
inline void write_lp(const Model& model, std::ostream& out) {
    out << "\\ generated model: " << model.num_vars() << " vars, " << model.num_rows()
        << " rows\n";
    out << "Minimize\n obj:";
    bool any = false;
    for (int j = 0; j < model.num_vars(); ++j) {
        if (model.c[j] == 0.0) continue;
        out << (model.c[j] < 0.0 ? " - " : (any ? " + " : " "))
            << scenred::detail::fmt_double(std::abs(model.c[j])) << " x" << j;
        any = true;
    }
    if (!any) out << " 0 x0";
    out << "\nSubject To\n";
    for (int r = 0; r < model.num_rows(); ++r) {
        const Row& row = model.rows[r];
        out << " c" << r << ":";
        bool first = true;
        for (std::size_t k = 0; k < row.idx.size(); ++k) {
            const double v = row.val[k];
            out << (v < 0.0 ? " - " : (first ? " " : " + ")) << scenred::detail::fmt_double(std::abs(v))
                << " x" << row.idx[k];
            first = false;
        }
        if (first) out << " 0 x0";
        const char* rel = row.sense == Sense::less_eq ? "<=" : (row.sense == Sense::equal ? "=" : ">=");
        out << " " << rel << " " << scenred::detail::fmt_double(row.rhs) << "\n";
    }
    out << "Bounds\n";
    const double inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j < model.num_vars(); ++j) {
        const double lo = model.lower[j], hi = model.upper[j];
        if (lo == -inf && hi == inf) {
            out << " x" << j << " free\n";
        } else if (lo == -inf) {
            out << " -inf <= x" << j << " <= " << scenred::detail::fmt_double(hi) << "\n";
        } else if (hi == inf) {
            out << " x" << j << " >= " << scenred::detail::fmt_double(lo) << "\n";
        } else {
            out << " " << scenred::detail::fmt_double(lo) << " <= x" << j << " <= "
                << scenred::detail::fmt_double(hi) << "\n";
        }
    }
    if (!model.binaries.empty()) {
        out << "Binaries\n";
        for (int b : model.binaries) out << " x" << b << "\n";
    }
    out << "End\n";
}

namespace detail_lp {

inline bool detail_lp_is_numeric_prefix(const std::string& s) {
    if (s.empty()) return false;
    const char c0 = s[0];
    return std::isdigit(static_cast<unsigned char>(c0)) || c0 == '.' || c0 == '+' || c0 == '-';
}

inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> toks;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            toks.push_back(cur);
            cur.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == '\\') {  // comment to end of line
            flush();
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            flush();
            continue;
        }
        if (ch == '+' || ch == '-') {
            // keep exponent signs inside numbers ("1e-07"); otherwise a sign
            // is its own token
            if (!cur.empty() && (cur.back() == 'e' || cur.back() == 'E') &&
                detail_lp_is_numeric_prefix(cur)) {
                cur.push_back(ch);
                continue;
            }
            flush();
            cur.push_back(ch);
            continue;
        }
        if (ch == '<' || ch == '>' || ch == '=') {
            if (!cur.empty() && cur != "<" && cur != ">") flush();
            cur.push_back(ch);
            if (cur == "<=" || cur == ">=" || (cur == "=" && (i + 1 >= text.size() || (text[i + 1] != '=')))) {
                flush();
            }
            continue;
        }
        cur.push_back(ch);
    }
    flush();
    return toks;
}

inline bool is_number(const std::string& t) {
    if (t.empty()) return false;
    char* end = nullptr;
    std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

inline int var_index(const std::string& t) {
    if (t.size() < 2 || t[0] != 'x') throw std::runtime_error("LP parse: expected variable, got '" + t + "'");
    return std::stoi(t.substr(1));
}

} // namespace detail_lp

/// Parses the subset of LP format emitted by write_lp.
inline Model read_lp(std::istream& in) {
    std::stringstream buf;
    buf << in.rdbuf();
    auto toks = detail_lp::tokenize(buf.str());

    Model model;
    std::size_t i = 0;
    auto lower_eq = [](const std::string& a, const char* b) {
        if (a.size() != std::string(b).size()) return false;
        for (std::size_t k = 0; k < a.size(); ++k)
            if (std::tolower(static_cast<unsigned char>(a[k])) != b[k]) return false;
        return true;
    };

    auto read_number = [&](const char* what) {
        if (i >= toks.size()) throw std::runtime_error(std::string("LP parse: missing ") + what);
        double sign = 1.0;
        if (toks[i] == "-" || toks[i] == "+") {
            sign = toks[i] == "-" ? -1.0 : 1.0;
            ++i;
            if (i >= toks.size()) throw std::runtime_error(std::string("LP parse: missing ") + what);
        }
        if (lower_eq(toks[i], "inf")) {
            ++i;
            return sign * std::numeric_limits<double>::infinity();
        }
        return sign * scenred::detail::parse_double(toks[i++], what);
    };

    int max_var = -1;
    struct Term {
        double coef;
        int var;
    };
    struct ParsedRow {
        std::vector<Term> terms;
        Sense sense;
        double rhs;
    };
    std::vector<Term> objective;
    std::vector<ParsedRow> rows;
    std::map<int, std::pair<double, double>> bounds;
    std::vector<int> binaries;

    auto parse_terms = [&](std::vector<Term>& out_terms) {
        // sequence of [sign] [number] var, ends at a relation or section word
        double sign = 1.0;
        bool have_sign = false;
        double coef = 1.0;
        bool have_coef = false;
        while (i < toks.size()) {
            const std::string& t = toks[i];
            if (t == "+" || t == "-") {
                sign = (t == "-") ? -1.0 : 1.0;
                have_sign = true;
                ++i;
                continue;
            }
            if (detail_lp::is_number(t)) {
                coef = scenred::detail::parse_double(t, "LP file");
                have_coef = true;
                ++i;
                continue;
            }
            if (t.size() >= 2 && t[0] == 'x' && std::isdigit(static_cast<unsigned char>(t[1]))) {
                const int v = detail_lp::var_index(t);
                max_var = std::max(max_var, v);
                out_terms.push_back(Term{(have_coef ? coef : 1.0) * (have_sign ? sign : 1.0), v});
                sign = 1.0;
                coef = 1.0;
                have_sign = have_coef = false;
                ++i;
                continue;
            }
            break;  // relation or next section
        }
    };

    while (i < toks.size()) {
        const std::string& t = toks[i];
        if (lower_eq(t, "minimize") || lower_eq(t, "min")) {
            ++i;
            if (i < toks.size() && toks[i].back() == ':') ++i;
            parse_terms(objective);
        } else if (lower_eq(t, "subject")) {
            ++i;
            if (i < toks.size() && lower_eq(toks[i], "to")) ++i;
            while (i < toks.size() && !lower_eq(toks[i], "bounds") && !lower_eq(toks[i], "binaries") &&
                   !lower_eq(toks[i], "end")) {
                if (toks[i].back() == ':') ++i;  // row label
                ParsedRow row;
                parse_terms(row.terms);
                if (i >= toks.size()) throw std::runtime_error("LP parse: row missing relation");
                const std::string rel = toks[i++];
                row.sense = rel == "<=" ? Sense::less_eq : (rel == ">=" ? Sense::greater_eq : Sense::equal);
                if (rel != "<=" && rel != ">=" && rel != "=")
                    throw std::runtime_error("LP parse: unknown relation '" + rel + "'");
                row.rhs = read_number("row rhs");
                rows.push_back(std::move(row));
            }
        } else if (lower_eq(t, "bounds")) {
            ++i;
            while (i < toks.size() && !lower_eq(toks[i], "binaries") && !lower_eq(toks[i], "end")) {
                // forms: "lo <= xj <= hi", "-inf <= xj <= hi", "xj >= lo", "xj free"
                if (toks[i][0] == 'x') {
                    const int v = detail_lp::var_index(toks[i++]);
                    max_var = std::max(max_var, v);
                    if (i < toks.size() && lower_eq(toks[i], "free")) {
                        bounds[v] = {-std::numeric_limits<double>::infinity(),
                                     std::numeric_limits<double>::infinity()};
                        ++i;
                    } else if (i < toks.size() && toks[i] == ">=") {
                        ++i;
                        bounds[v] = {read_number("bound"), std::numeric_limits<double>::infinity()};
                    } else if (i < toks.size() && toks[i] == "<=") {
                        ++i;
                        bounds[v] = {0.0, read_number("bound")};
                    } else {
                        throw std::runtime_error("LP parse: malformed bound");
                    }
                } else {
                    const double lo = read_number("bound");
                    if (i >= toks.size() || toks[i] != "<=") throw std::runtime_error("LP parse: malformed bound");
                    ++i;
                    const int v = detail_lp::var_index(toks[i++]);
                    max_var = std::max(max_var, v);
                    double hi = std::numeric_limits<double>::infinity();
                    if (i < toks.size() && toks[i] == "<=") {
                        ++i;
                        hi = read_number("bound");
                    }
                    bounds[v] = {lo, hi};
                }
            }
        } else if (lower_eq(t, "binaries") || lower_eq(t, "binary")) {
            ++i;
            while (i < toks.size() && !lower_eq(toks[i], "end")) {
                binaries.push_back(detail_lp::var_index(toks[i]));
                max_var = std::max(max_var, binaries.back());
                ++i;
            }
        } else if (lower_eq(t, "end")) {
            break;
        } else {
            throw std::runtime_error("LP parse: unexpected token '" + t + "'");
        }
    }

    const int n = max_var + 1;
    if (n <= 0) throw std::runtime_error("LP parse: no variables");
    model.c = Eigen::VectorXd::Zero(n);
    model.lower = Eigen::VectorXd::Zero(n);
    model.upper = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    for (const auto& term : objective) model.c[term.var] += term.coef;
    for (const auto& row : rows) {
        Row r;
        for (const auto& term : row.terms) {
            r.idx.push_back(term.var);
            r.val.push_back(term.coef);
        }
        r.sense = row.sense;
        r.rhs = row.rhs;
        model.rows.push_back(std::move(r));
    }
    for (const auto& [v, lohi] : bounds) {
        model.lower[v] = lohi.first;
        model.upper[v] = lohi.second;
    }
    for (int b : binaries) {
        model.lower[b] = std::max(model.lower[b], 0.0);
        model.upper[b] = std::min(model.upper[b], 1.0);
    }
    model.binaries = std::move(binaries);
    model.validate();
    return model;
}

} // namespace scenred::milp
