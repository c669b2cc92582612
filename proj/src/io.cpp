#include "fpml/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fpml {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void write_field_csv(const Field& u, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  const Grid& g = u.grid();
  os << (g.dim() == 1 ? "x,value\n" : "x0,x1,value\n");
  double xy[2];
  for (std::size_t i = 0; i < u.size(); ++i) {
    node_coords(g, i, xy);
    os << g17(xy[0]);
    if (g.dim() == 2) os << ',' << g17(xy[1]);
    os << ',' << g17(u[i]) << '\n';
  }
  if (!os) throw std::runtime_error("short write to " + path);
}

void write_field_binary(const Field& u, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  const Grid& g = u.grid();
  put(os, static_cast<std::int32_t>(g.dim()));
  put(os, g.half_length());
  put(os, static_cast<std::int32_t>(g.points_per_dim()));
  put(os, static_cast<std::int32_t>(g.boundary()));
  os.write(reinterpret_cast<const char*>(u.values().data()),
           static_cast<std::streamsize>(u.size() * sizeof(double)));
  if (!os) throw std::runtime_error("short write to " + path);
}

Field read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::int32_t dim = 0, m = 0, boundary = 0;
  double l = 0.0;
  get(is, dim);
  get(is, l);
  get(is, m);
  get(is, boundary);
  if (boundary < 0 || boundary > 2)
    throw std::runtime_error("corrupt field snapshot: " + path);
  Grid g = Grid::make(dim, l, m, static_cast<Boundary>(boundary));
  std::vector<double> v(g.node_count());
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated field snapshot: " + path);
  return Field(g, std::move(v));
}

void write_series_csv(const DiagnosticsSeries& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "t,mass,l1,l2,lmp1,linf,min,energy\n";
  for (const auto& r : s.rows) {
    os << g17(r.t) << ',' << g17(r.mass) << ',' << g17(r.l1) << ',' << g17(r.l2)
       << ',' << g17(r.lmp1) << ',' << g17(r.linf) << ',' << g17(r.min_u) << ','
       << g17(r.energy) << '\n';
  }
  if (!os) throw std::runtime_error("short write to " + path);
}

void write_series_plot_csv(const DiagnosticsSeries& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "t,mass,l1,l2,lmp1,linf,min,energy,log10_t,log10_l1,log10_l2,log10_linf\n";
  auto log_or_empty = [](double v) {
    return v > 0 ? g17(std::log10(v)) : std::string();
  };
  for (const auto& r : s.rows) {
    os << g17(r.t) << ',' << g17(r.mass) << ',' << g17(r.l1) << ',' << g17(r.l2)
       << ',' << g17(r.lmp1) << ',' << g17(r.linf) << ',' << g17(r.min_u) << ','
       << g17(r.energy) << ',' << log_or_empty(r.t) << ',' << log_or_empty(r.l1)
       << ',' << log_or_empty(r.l2) << ',' << log_or_empty(r.linf) << '\n';
  }
  if (!os) throw std::runtime_error("short write to " + path);
}

}  // namespace fpml
