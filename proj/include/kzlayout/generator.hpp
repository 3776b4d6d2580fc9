#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "spec_io.hpp"
#include "spec_model.hpp"

namespace kzlayout {

enum class Axis { X, Y };

struct Widget {
    std::size_t left, top, right, bottom;  // tabstop variable indices
};

struct LayoutSpec {
    std::size_t x_tabs = 0;
    std::size_t y_tabs = 0;
    std::vector<Axis> axis;  // axis of each variable
    std::vector<Widget> widgets;
    Specification spec{1, {}};
};

struct LayoutOptions {
    double width = 800.0;
    double height = 600.0;
    bool with_bounds = false;  // 2 extra hard min-size inequalities per widget
    double dock_probability = 0.25;
    double min_size = 10.0;
    int pref_min = 20;
    int pref_max = 200;
};

/// Random GUI-like layout with 4 constraints per widget.
///
/// Widget 0 is the window itself: its four hard constraints pin the outer
/// tabstops to x=0, y=0, x=W, y=H. Every later widget picks a random anchor
/// widget and a direction (coin flip). It gets its own tabstops, glued to
/// the anchor by two hard positioning equalities: horizontally its left
/// edge meets the anchor's right edge and the tops align; vertically its
/// top meets the anchor's bottom and the left edges align. Children of the
/// window start at its origin. With probability `dock_probability` the
/// widget instead docks to the window edge in that direction and reuses
/// the window's right (or bottom) tabstop. Each widget also gets two soft
/// preferred-size equalities, width and height, drawn uniformly from
/// [pref_min, pref_max]; docked widgets make those over-determine the
/// window.
///
/// Priorities: every hard constraint outranks every soft one; within a
/// class, creation order.
inline LayoutSpec generate_layout(std::size_t widgets, std::uint64_t seed,
                                  const LayoutOptions& opt = {}) {
    if (widgets == 0) throw std::invalid_argument("generate_layout: need at least one widget");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5), dock(opt.dock_probability);
    std::uniform_int_distribution<int> pref(opt.pref_min, opt.pref_max);

    LayoutSpec out;
    auto new_tab = [&](Axis a) {
        out.axis.push_back(a);
        ++(a == Axis::X ? out.x_tabs : out.y_tabs);
        return out.axis.size() - 1;
    };

    enum class Kind { Hard, Bound, Soft };
    struct Pending {
        std::vector<Term> terms;
        Relation rel;
        double rhs;
        Kind kind;
    };
    std::vector<Pending> rows;

    const Widget window{new_tab(Axis::X), new_tab(Axis::Y), new_tab(Axis::X), new_tab(Axis::Y)};
    out.widgets.push_back(window);
    rows.push_back({{{window.left, 1.0}}, Relation::EQ, 0.0, Kind::Hard});
    rows.push_back({{{window.top, 1.0}}, Relation::EQ, 0.0, Kind::Hard});
    rows.push_back({{{window.right, 1.0}}, Relation::EQ, opt.width, Kind::Hard});
    rows.push_back({{{window.bottom, 1.0}}, Relation::EQ, opt.height, Kind::Hard});

    for (std::size_t k = 1; k < widgets; ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, out.widgets.size() - 1);
        const std::size_t anchor_id = pick(rng);
        const Widget anchor = out.widgets[anchor_id];
        const bool horizontal = coin(rng);
        const bool docked = dock(rng);

        std::size_t tie_x, tie_y;
        if (anchor_id == 0) {
            tie_x = window.left;
            tie_y = window.top;
        } else if (horizontal) {
            tie_x = anchor.right;
            tie_y = anchor.top;
        } else {
            tie_x = anchor.left;
            tie_y = anchor.bottom;
        }

        Widget w{};
        w.left = new_tab(Axis::X);
        w.top = new_tab(Axis::Y);
        w.right = docked && horizontal ? window.right : new_tab(Axis::X);
        w.bottom = docked && !horizontal ? window.bottom : new_tab(Axis::Y);
        out.widgets.push_back(w);

        rows.push_back({{{w.left, 1.0}, {tie_x, -1.0}}, Relation::EQ, 0.0, Kind::Hard});
        rows.push_back({{{w.top, 1.0}, {tie_y, -1.0}}, Relation::EQ, 0.0, Kind::Hard});
        if (opt.with_bounds) {
            rows.push_back({{{w.right, 1.0}, {w.left, -1.0}}, Relation::GE, opt.min_size, Kind::Bound});
            rows.push_back({{{w.bottom, 1.0}, {w.top, -1.0}}, Relation::GE, opt.min_size, Kind::Bound});
        }
        rows.push_back({{{w.right, 1.0}, {w.left, -1.0}}, Relation::EQ, double(pref(rng)), Kind::Soft});
        rows.push_back({{{w.bottom, 1.0}, {w.top, -1.0}}, Relation::EQ, double(pref(rng)), Kind::Soft});
    }

    std::uint64_t rank = 0;
    std::vector<std::uint64_t> priority(rows.size());
    for (Kind kind : {Kind::Hard, Kind::Bound, Kind::Soft})
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].kind == kind) priority[i] = rank++;

    std::vector<Constraint> cs;
    cs.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        cs.emplace_back(std::move(rows[i].terms), rows[i].rel, rows[i].rhs, priority[i]);
    out.spec = Specification(out.axis.size(), std::move(cs));
    return out;
}

/// Ids of the hard (non-soft) constraints of a generated layout: everything
/// except the preferred-size equalities, which carry the lowest ranks.
inline ConstraintSet hard_constraints(const LayoutSpec& layout) {
    const std::size_t soft = 2 * (layout.widgets.size() - 1);
    ConstraintSet ids;
    for (std::size_t id = 0; id < layout.spec.size(); ++id)
        if (layout.spec.rank_position(id) < layout.spec.size() - soft) ids.push_back(id);
    return ids;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct SuiteEntry {
    std::size_t widgets;
    std::size_t run;
    std::uint64_t seed;
};

/// Deterministic plan: sizes min..max by step, `runs` layouts each.
inline std::vector<SuiteEntry> plan_suite(std::size_t min_widgets, std::size_t max_widgets,
                                          std::size_t step, std::size_t runs,
                                          std::uint64_t base_seed) {
    if (min_widgets == 0 || max_widgets < min_widgets || step == 0)
        throw std::invalid_argument("plan_suite: need 1 <= min <= max and step >= 1");
    std::vector<SuiteEntry> plan;
    for (std::size_t w = min_widgets; w <= max_widgets; w += step)
        for (std::size_t r = 0; r < runs; ++r)
            plan.push_back({w, r, splitmix64(splitmix64(base_seed ^ splitmix64(w)) + r)});
    return plan;
}

inline std::vector<LayoutSpec> generate_suite(std::size_t min_widgets, std::size_t max_widgets,
                                              std::size_t step, std::size_t runs,
                                              std::uint64_t base_seed,
                                              const LayoutOptions& opt = {}) {
    std::vector<LayoutSpec> suite;
    for (const auto& e : plan_suite(min_widgets, max_widgets, step, runs, base_seed))
        suite.push_back(generate_layout(e.widgets, e.seed, opt));
    return suite;
}

/// 64-bit FNV-1a, used to fingerprint serialized suites.
inline std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char ch : text) h = (h ^ ch) * 0x100000001b3ull;
    return h;
}

inline std::uint64_t suite_hash(const std::vector<LayoutSpec>& suite) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& l : suite) h = fnv1a(serialize_specification(l.spec), h);
    return h;
}

/// Writes every layout of the plan to `dir` plus an `index.tsv` listing
/// (size, run, path, seed). Returns the suite hash.
inline std::uint64_t write_suite(const std::filesystem::path& dir,
                                 const std::vector<SuiteEntry>& plan,
                                 const LayoutOptions& opt = {}) {
    std::filesystem::create_directories(dir);
    std::ofstream index(dir / "index.tsv");
    index << "size\trun\tpath\tseed\n";
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& e : plan) {
        const auto layout = generate_layout(e.widgets, e.seed, opt);
        const auto text = serialize_specification(layout.spec);
        h = fnv1a(text, h);
        const std::string name =
            "layout_w" + std::to_string(e.widgets) + "_r" + std::to_string(e.run) + ".spec";
        std::ofstream(dir / name) << text;
        index << layout.spec.size() << '\t' << e.run << '\t' << name << '\t' << e.seed << '\n';
    }
    if (!index) throw std::runtime_error("write_suite: cannot write " + (dir / "index.tsv").string());
    return h;
}

}  // namespace kzlayout
