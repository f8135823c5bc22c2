#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>

namespace rtsmp {

/// Scalar expression over phase-space coordinates.
///
/// Grammar: numbers, `+ - * / ^`, unary minus, parentheses, the constants
/// `pi` and `e`, the variables `x0..x9` and `v0..v9` (`x`, `v` alias axis 0),
/// and the functions sin cos tan exp log sqrt abs floor ceil sign step
/// (step(t) = 1 for t >= 0, else 0), min(a,b), max(a,b), pow(a,b).
class Expression {
  public:
    /// Throws ValidationError on a syntax error.
    explicit Expression(std::string text);

    double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;

    const std::string& text() const { return text_; }
    /// Highest x / v axis referenced, or -1.
    int max_x_axis() const { return max_x_; }
    int max_v_axis() const { return max_v_; }

    struct Node;

  private:
    std::string text_;
    std::shared_ptr<const Node> root_;
    int max_x_ = -1;
    int max_v_ = -1;
};

}  // namespace rtsmp
