#include "pcount/grid.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "pcount/error.hpp"

namespace pcount {
namespace {

double round12(double v) {
  const double r = std::round(v * 1e12) / 1e12;
  return r == 0.0 ? 0.0 : r;
}

double parse_number(std::string_view s, std::string_view whole) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw InvalidArgument("bad number '" + std::string(s) + "' in grid '" + std::string(whole) + "'");
  return v;
}

}  // namespace

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("grid step must be positive");
  if (!(stop >= start)) throw InvalidArgument("grid stop must not be below start");
  const double span = (stop - start) / step;
  auto n = static_cast<long long>(std::floor(span + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (long long k = 0; k <= n; ++k) grid.push_back(round12(start + static_cast<double>(k) * step));
  return grid;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos)
    throw InvalidArgument("grid must look like START:STOP:STEP, got '" + std::string(text) + "'");
  return make_grid(parse_number(text.substr(0, a), text), parse_number(text.substr(a + 1, b - a - 1), text),
                   parse_number(text.substr(b + 1), text));
}

std::vector<double> default_direct_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 10; ++k) g.push_back(k / 10.0);
  return g;
}

std::vector<double> default_persistence_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 10; ++k) g.push_back(k * 4 / 1000.0);
  return g;
}

void require_increasing(const std::vector<double>& grid, std::string_view what) {
  if (grid.empty()) throw InvalidArgument(std::string(what) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument(std::string(what) + " grid is not strictly increasing");
}

}  // namespace pcount
