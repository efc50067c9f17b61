#pragma once

#include <cmath>

namespace annulus {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double a) const { return {a * x, a * y}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  // z-component of the cross product; positive when o is counterclockwise of *this
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
  Vec2 normalized() const { double n = norm(); return {x / n, y / n}; }
};

constexpr Vec2 operator*(double a, Vec2 v) { return {a * v.x, a * v.y}; }

}  // namespace annulus
