#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "vdfp/params.hpp"

namespace vdfp {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  int worst_index = -1;
};

// Central finite differences over every coordinate of every array in `point`,
// compared against the supplied analytic gradient. The relative error per
// coordinate is |analytic - numeric| / max(1, |analytic|, |numeric|).
//
// f must be a deterministic scalar function of the store (callers pin any
// randomness, e.g. dropout masks, by reseeding inside f). The point is
// restored exactly after each probe.
template <class F>
GradCheckReport grad_check(F&& f, ParamStore& point, const GradMap& analytic, double h = 1e-5) {
  GradCheckReport rep;
  for (const auto& name : point.order) {
    Array& p = point.values.at(name);
    auto git = analytic.find(name);
    const Array* g = git == analytic.end() ? nullptr : &git->second;
    for (std::int64_t i = 0; i < p.size(); ++i) {
      double saved = p.data[i];
      p.data[i] = saved + h;
      double fp = f(static_cast<const ParamStore&>(point));
      p.data[i] = saved - h;
      double fm = f(static_cast<const ParamStore&>(point));
      p.data[i] = saved;
      double numeric = (fp - fm) / (2.0 * h);
      double exact = g ? g->data[i] : 0.0;
      double rel = std::abs(exact - numeric) /
                   std::max({1.0, std::abs(exact), std::abs(numeric)});
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_param = name;
        rep.worst_index = static_cast<int>(i);
      }
    }
  }
  return rep;
}

}  // namespace vdfp
