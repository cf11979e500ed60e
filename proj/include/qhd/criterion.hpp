#pragma once

#include "qhd/blowup.hpp"
#include "qhd/plumbing.hpp"
#include "qhd/shape.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qhd {

/// Sum of (d_i - 3) over all vertices.
inline int sum_d_minus_3(const WeightedGraph& g) {
    int s = 0;
    for (const auto& [v, w] : g.weights()) s += -w - 3;
    return s;
}

enum class Stage { IsGamma1Bar, BeyondGamma2 };

inline std::string stage_name(Stage s) { return s == Stage::IsGamma1Bar ? "IsGamma1Bar" : "BeyondGamma2"; }

struct LedgerAnnotation {
    int epsilon = 0;
    int m = 0;
    LemmaMatch gamma1_match;
    Stage stage = Stage::IsGamma1Bar;
    std::size_t gamma1_ops = 0;  // number of ops that produce the non-minimal graph matched above
    WeightedGraph gamma1;
};

class AnnotateError : public GraphError {
public:
    using GraphError::GraphError;
};

/// Gamma_1 could not be matched; carries the matcher's diagnostic.
class UnmatchedGamma1 : public AnnotateError {
public:
    UnmatchedGamma1(LemmaMatch m, WeightedGraph g)
        : AnnotateError("Gamma_1 unmatched: " + m.note), match(std::move(m)), gamma1(std::move(g)) {}
    LemmaMatch match;
    WeightedGraph gamma1;
    /// A valency-4 node with self-intersection > -3 cannot occur on a rational singularity.
    bool non_rational() const { return match.note.rfind("valency-4 node", 0) == 0; }
};

/// Gamma_1 is the graph after the op that first yields two nodes, extended by any directly
/// following (B-2) moves; the next (B-1) gives Gamma_2 and m counts the (B-1) moves after it.
inline LedgerAnnotation annotate(const ConstructionHistory& h) {
    auto steps = replay_steps(h);
    std::size_t prev_nodes = 0, first = steps.size();
    for (std::size_t k = 0; k < steps.size(); ++k) {
        std::size_t n = nodes(steps[k]).size();
        if (n < prev_nodes) throw AnnotateError("node count decreased at op " + std::to_string(k - 1));
        if (n >= 2 && first == steps.size()) first = k;
        prev_nodes = n;
    }
    if (first == steps.size()) throw AnnotateError("minimal graph has fewer than two nodes");
    std::size_t idx = first;
    while (idx < h.ops.size() && h.ops[idx].kind == BlowUpOp::Kind::B2) ++idx;

    LedgerAnnotation ann;
    ann.gamma1_ops = idx;
    ann.gamma1 = steps[idx];
    ann.gamma1_match = match_lemma(ann.gamma1);
    if (!ann.gamma1_match.matched()) throw UnmatchedGamma1(ann.gamma1_match, ann.gamma1);
    ann.epsilon = epsilon_of(ann.gamma1_match);
    if (idx == h.ops.size()) {
        ann.stage = Stage::IsGamma1Bar;
        ann.m = 0;
        return ann;
    }
    ann.stage = Stage::BeyondGamma2;
    for (std::size_t k = idx + 1; k < h.ops.size(); ++k)
        if (h.ops[k].kind == BlowUpOp::Kind::B1) ++ann.m;
    return ann;
}

inline WeightedGraph minimal_graph(const ConstructionHistory& h, const mpq_class& cross_ratio = -1) {
    ConstructionHistory hm = h;
    hm.modified = true;
    return with_default_cross_ratio(replay(hm), cross_ratio);
}

/// Checks sum(d_i - 3) = -eps - 1 - m on the given minimal graph.
inline bool ledger_check(const LedgerAnnotation& ann, const WeightedGraph& minimal) {
    if (ann.stage != Stage::BeyondGamma2) throw AnnotateError("ledger_check needs a history beyond Gamma_2");
    return sum_d_minus_3(minimal) == -ann.epsilon - 1 - ann.m;
}

inline bool ledger_check(const ConstructionHistory& h) { return ledger_check(annotate(h), minimal_graph(h)); }

/// Bound tracker for one blow-up: +1 at a smooth point (B-1), +0 at a point on two curves (B-2).
inline int flenner_zaidenberg_step(int bound, const BlowUpOp& op) {
    return op.kind == BlowUpOp::Kind::B1 ? bound + 1 : bound;
}

enum class Mode { Bookkeeping, Cohomology };

inline std::string mode_name(Mode m) { return m == Mode::Bookkeeping ? "bookkeeping" : "cohomology"; }

enum class Verdict { NoQhdSmoothing, Inconclusive };

inline std::string verdict_name(Verdict v) { return v == Verdict::NoQhdSmoothing ? "NoQhdSmoothing" : "Inconclusive"; }

struct QhdVerdict {
    Mode mode = Mode::Bookkeeping;
    int sum_d3 = 0;
    int h1_bound = 0;
    int dim_bound = 0;
    Verdict verdict = Verdict::Inconclusive;
    std::optional<LedgerAnnotation> annotation;
    std::optional<H1LogResult> h1;
};

struct CriterionOptions {
    int max_multiplier = 8;
    mpq_class cross_ratio = -1;
};

inline QhdVerdict finish_verdict(QhdVerdict v) {
    v.dim_bound = v.h1_bound + v.sum_d3;
    v.verdict = v.dim_bound <= 0 ? Verdict::NoQhdSmoothing : Verdict::Inconclusive;
    return v;
}

inline QhdVerdict bookkeeping_bound(const ConstructionHistory& h, const WeightedGraph& minimal) {
    QhdVerdict v;
    v.mode = Mode::Bookkeeping;
    auto ann = annotate(h);
    v.sum_d3 = sum_d_minus_3(minimal);
    if (ann.stage == Stage::IsGamma1Bar) {
        v.h1_bound = ann.epsilon;
    } else {
        int b = ann.epsilon + 1;
        for (std::size_t k = ann.gamma1_ops + 1; k < h.ops.size(); ++k) b = flenner_zaidenberg_step(b, h.ops[k]);
        v.h1_bound = b;
    }
    v.annotation = ann;
    return finish_verdict(v);
}

inline QhdVerdict cohomology_bound(const WeightedGraph& minimal, int max_multiplier) {
    QhdVerdict v;
    v.mode = Mode::Cohomology;
    v.sum_d3 = sum_d_minus_3(minimal);
    v.h1 = h1_log(minimal, max_multiplier);
    v.h1_bound = v.h1->value;
    return finish_verdict(v);
}

inline QhdVerdict dimension_bound(const ConstructionHistory& h, Mode mode, const CriterionOptions& opt = {}) {
    WeightedGraph g = minimal_graph(h, opt.cross_ratio);
    if (nodes(g).size() < 2) throw AnnotateError("minimal graph has fewer than two nodes");
    if (mode == Mode::Bookkeeping) return bookkeeping_bound(h, g);
    QhdVerdict v = cohomology_bound(g, opt.max_multiplier);
    try {
        v.annotation = annotate(h);
    } catch (const AnnotateError&) {
    }
    return v;
}

} // namespace qhd
