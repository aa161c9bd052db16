#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace diraclab {

enum class Status { pass, fail, not_applicable };

std::string_view to_string(Status s);

/// Outcome of one inequality or property check over a run.
///
/// `worst_margin` is the smallest (bound - observed) over every checked sample; the
/// check passes when worst_margin >= -tolerance.
struct Verdict {
    std::string name;
    Status status = Status::not_applicable;
    double worst_margin = std::numeric_limits<double>::infinity();
    double tolerance = 0.0;
    std::size_t checked = 0;
    std::string note;
    /// Reported but never fails a run.
    bool informational = false;

    void observe(double margin)
    {
        ++checked;
        if (margin < worst_margin) worst_margin = margin;
    }

    /// Sets status from the observations unless the check was marked not applicable.
    Verdict &finish()
    {
        if (status != Status::not_applicable) status = worst_margin >= -tolerance ? Status::pass : Status::fail;
        return *this;
    }
};

inline Verdict make_verdict(std::string name, double tolerance)
{
    Verdict v;
    v.name = std::move(name);
    v.tolerance = tolerance;
    v.status = Status::pass;
    return v;
}

inline Verdict not_applicable(std::string name, std::string why)
{
    Verdict v;
    v.name = std::move(name);
    v.status = Status::not_applicable;
    v.note = std::move(why);
    return v;
}

/// True when no gating verdict failed.
bool all_pass(std::span<const Verdict> verdicts);

} // namespace diraclab
