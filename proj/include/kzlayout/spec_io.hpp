#pragma once

#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "spec_model.hpp"

namespace kzlayout {

// Text format, one record per line:
//
//   # comment
//   vars <n>
//   c <priority> <eq|le|ge> <rhs> <idx>:<coef> [<idx>:<coef> ...]

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
    T value{};
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && tok.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last)
        throw SpecError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
    return value;
}

inline void append_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

inline const char* relation_token(Relation r) {
    switch (r) {
        case Relation::EQ: return "eq";
        case Relation::LE: return "le";
        case Relation::GE: return "ge";
    }
    return "eq";
}

}  // namespace detail

inline Specification parse_specification(std::string_view text) {
    std::size_t num_vars = 0;
    std::size_t header_line = 0;
    std::vector<Constraint> constraints;
    std::map<std::uint64_t, std::size_t> priority_line;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        auto toks = detail::split_ws(line);
        if (toks.empty() || toks.front().front() == '#') {
            if (end == text.size()) break;
            continue;
        }

        if (toks[0] == "vars") {
            if (header_line != 0)
                throw SpecError("duplicate 'vars' header (first on line " +
                                    std::to_string(header_line) + ")",
                                line_no);
            if (toks.size() != 2) throw SpecError("expected 'vars <n>'", line_no);
            num_vars = detail::parse_number<std::size_t>(toks[1], line_no, "variable count");
            if (num_vars == 0) throw SpecError("variable count must be positive", line_no);
            header_line = line_no;
        } else if (toks[0] == "c") {
            if (header_line == 0) throw SpecError("constraint before 'vars' header", line_no);
            if (toks.size() < 4)
                throw SpecError("expected 'c <priority> <op> <rhs> <idx>:<coef>...'", line_no);
            auto priority = detail::parse_number<std::uint64_t>(toks[1], line_no, "priority");
            Relation rel;
            if (toks[2] == "eq") rel = Relation::EQ;
            else if (toks[2] == "le") rel = Relation::LE;
            else if (toks[2] == "ge") rel = Relation::GE;
            else throw SpecError("unknown relation '" + std::string(toks[2]) + "'", line_no);
            double rhs = detail::parse_number<double>(toks[3], line_no, "right-hand side");
            if (toks.size() == 4) throw SpecError("empty constraint row", line_no);

            std::vector<Term> terms;
            for (std::size_t k = 4; k < toks.size(); ++k) {
                auto colon = toks[k].find(':');
                if (colon == std::string_view::npos)
                    throw SpecError("expected '<idx>:<coef>', got '" + std::string(toks[k]) + "'",
                                    line_no);
                auto idx = detail::parse_number<std::size_t>(toks[k].substr(0, colon), line_no,
                                                             "variable index");
                auto coef = detail::parse_number<double>(toks[k].substr(colon + 1), line_no,
                                                         "coefficient");
                if (idx >= num_vars)
                    throw SpecError("variable index " + std::to_string(idx) +
                                        " out of range (vars " + std::to_string(num_vars) + ")",
                                    line_no);
                terms.push_back({idx, coef});
            }

            auto [it, fresh] = priority_line.emplace(priority, line_no);
            if (!fresh)
                throw SpecError("duplicate priority " + std::to_string(priority) +
                                    " (also on line " + std::to_string(it->second) + ")",
                                line_no);
            try {
                constraints.emplace_back(std::move(terms), rel, rhs, priority);
            } catch (const SpecError& e) {
                throw SpecError(e.what(), line_no);
            }
        } else {
            throw SpecError("unknown record '" + std::string(toks[0]) + "'", line_no);
        }
        if (end == text.size()) break;
    }

    if (header_line == 0) throw SpecError("missing 'vars <n>' header");
    return Specification(num_vars, std::move(constraints));
}

inline std::string serialize_specification(const Specification& s) {
    std::string out = "vars " + std::to_string(s.num_vars()) + "\n";
    for (const auto& c : s.constraints()) {
        out += "c ";
        out += std::to_string(c.priority());
        out += ' ';
        out += detail::relation_token(c.relation());
        out += ' ';
        detail::append_double(out, c.rhs());
        for (const auto& t : c.terms()) {
            out += ' ';
            out += std::to_string(t.index);
            out += ':';
            detail::append_double(out, t.coef);
        }
        out += '\n';
    }
    return out;
}

}  // namespace kzlayout
