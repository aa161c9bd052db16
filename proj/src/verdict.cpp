#include "diraclab/verdict.hpp"

#include <algorithm>

namespace diraclab {

std::string_view to_string(Status s)
{
    switch (s) {
        case Status::pass:
            return "PASS";
        case Status::fail:
            return "FAIL";
        case Status::not_applicable:
            return "NOT-APPLICABLE";
    }
    return "NOT-APPLICABLE";
}

bool all_pass(std::span<const Verdict> verdicts)
{
    return std::none_of(verdicts.begin(), verdicts.end(),
                        [](const Verdict &v) { return !v.informational && v.status == Status::fail; });
}

} // namespace diraclab
