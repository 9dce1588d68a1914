#include "lcamr/quadrature.hpp"

#include <stdexcept>

namespace lcamr {

namespace {

// Gauss-Legendre abscissae/weights on [-1,1].
void gauss_reference(int n, std::vector<double>& x, std::vector<double>& w) {
  switch (n) {
    case 1:
      x = {0.0};
      w = {2.0};
      break;
    case 2:
      x = {-0.57735026918962576451, 0.57735026918962576451};
      w = {1.0, 1.0};
      break;
    case 3:
      x = {-0.77459666924148337704, 0.0, 0.77459666924148337704};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    case 4:
      x = {-0.86113631159405257522, -0.33998104358485626480,
           0.33998104358485626480, 0.86113631159405257522};
      w = {0.34785484513745385737, 0.65214515486254614263,
           0.65214515486254614263, 0.34785484513745385737};
      break;
    case 5:
      x = {-0.90617984593866399280, -0.53846931010568309104, 0.0,
           0.53846931010568309104, 0.90617984593866399280};
      w = {0.23692688505618908751, 0.47862867049936646804,
           0.56888888888888888889, 0.47862867049936646804,
           0.23692688505618908751};
      break;
    case 6:
      x = {-0.93246951420315202781, -0.66120938646626451366,
           -0.23861918608319690863, 0.23861918608319690863,
           0.66120938646626451366, 0.93246951420315202781};
      w = {0.17132449237917034504, 0.36076157304813860757,
           0.46791393457269104739, 0.46791393457269104739,
           0.36076157304813860757, 0.17132449237917034504};
      break;
    default:
      throw std::invalid_argument("gauss1d: unsupported order " +
                                  std::to_string(n) + " (supported: 1..6)");
  }
}

}  // namespace

LineRule gauss1d(int order) {
  std::vector<double> x, w;
  gauss_reference(order, x, w);
  LineRule rule;
  rule.points.resize(x.size());
  rule.weights.resize(w.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.points[i] = 0.5 * (x[i] + 1.0);
    rule.weights[i] = 0.5 * w[i];
  }
  return rule;
}

QuadratureRule quadrature(int order) {
  const LineRule line = gauss1d(order);
  QuadratureRule rule;
  rule.points.reserve(line.size() * line.size());
  rule.weights.reserve(line.size() * line.size());
  for (int j = 0; j < line.size(); ++j) {
    for (int i = 0; i < line.size(); ++i) {
      rule.points.emplace_back(line.points[i], line.points[j]);
      rule.weights.push_back(line.weights[i] * line.weights[j]);
    }
  }
  return rule;
}

}  // namespace lcamr
