#include "rigcert/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "rigcert/error.hpp"

namespace rigcert {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

constexpr int kSign2[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
constexpr int kSign3[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                              {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};

struct FaceDef {
  int fixed;  // reference coordinate held fixed
  int sign;   // its value, -1 or +1
  std::array<int, 4> local;
};

constexpr FaceDef kEdges[4] = {{1, -1, {0, 1, -1, -1}}, {0, 1, {1, 2, -1, -1}}, {1, 1, {2, 3, -1, -1}}, {0, -1, {3, 0, -1, -1}}};
constexpr FaceDef kFaces[6] = {{2, -1, {0, 3, 2, 1}}, {2, 1, {4, 5, 6, 7}}, {1, -1, {0, 1, 5, 4}},
                               {0, 1, {1, 2, 6, 5}},  {1, 1, {2, 3, 7, 6}}, {0, -1, {3, 0, 4, 7}}};

const FaceDef& face_def(int dim, int local) { return dim == 2 ? kEdges[local] : kFaces[local]; }

int sign_of(int dim, int a, int d) { return dim == 2 ? kSign2[a][d] : kSign3[a][d]; }

std::vector<Vec> gauss_points(int dim) {
  std::vector<Vec> pts;
  if (dim == 2) {
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        Vec p(2);
        p << (i ? kGauss : -kGauss), (j ? kGauss : -kGauss);
        pts.push_back(p);
      }
  } else {
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
          Vec p(3);
          p << (i ? kGauss : -kGauss), (j ? kGauss : -kGauss), (k ? kGauss : -kGauss);
          pts.push_back(p);
        }
  }
  return pts;
}

std::array<int, 4> sorted_key(const Facet& f, int count) {
  std::array<int, 4> k = f.nodes;
  std::sort(k.begin(), k.begin() + count);
  return k;
}

}  // namespace

Vec reference_corner(int dim, int a) {
  Vec xi(dim);
  for (int d = 0; d < dim; ++d) xi(d) = sign_of(dim, a, d);
  return xi;
}

void Mesh::shape(const Vec& xi, ShapeVal& n, ShapeGrad& dn_ref) const {
  const int nen = nodes_per_element();
  const double scale = dim_ == 2 ? 0.25 : 0.125;
  n.resize(nen);
  dn_ref.resize(dim_, nen);
  for (int a = 0; a < nen; ++a) {
    double f[3];
    for (int d = 0; d < dim_; ++d) f[d] = 1 + sign_of(dim_, a, d) * xi(d);
    double prod = scale;
    for (int d = 0; d < dim_; ++d) prod *= f[d];
    n(a) = prod;
    for (int d = 0; d < dim_; ++d) {
      double g = scale * sign_of(dim_, a, d);
      for (int e = 0; e < dim_; ++e)
        if (e != d) g *= f[e];
      dn_ref(d, a) = g;
    }
  }
}

double Mesh::map(std::size_t element, const Vec& xi, Vec& x, ShapeVal& n, ShapeGrad& dn) const {
  ShapeGrad dref;
  shape(xi, n, dref);
  const int nen = nodes_per_element();
  Mat jac = Mat::Zero(dim_, dim_);
  x = Vec::Zero(dim_);
  for (int a = 0; a < nen; ++a) {
    const Vec& xa = nodes_[elements_[element][a]];
    x += n(a) * xa;
    jac += xa * dref.col(a).transpose();
  }
  const double det = jac.determinant();
  dn = jac.transpose().inverse() * dref;
  return det;
}

void Mesh::compute_quadrature() {
  const auto pts = gauss_points(dim_);
  const int nq = qp_per_element();
  qps_.assign(elements_.size() * nq, QuadPoint{});
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    for (int q = 0; q < nq; ++q) {
      QuadPoint& p = qps_[e * nq + q];
      p.xi = pts[q];
      const double det = map(e, p.xi, p.x, p.n, p.dn);
      if (!(det > 0))
        fail(ErrorCode::DeterminantViolation, "element " + std::to_string(e) + " has non-positive Jacobian");
      p.weight = det;
    }
  }
  // Facet quadrature on the traction part.
  const int nfq = qp_per_facet();
  fqps_.assign(traction_.size() * nfq, FacetPoint{});
  for (std::size_t t = 0; t < traction_.size(); ++t) {
    const Facet& f = facets_[traction_[t]];
    const FaceDef& def = face_def(dim_, f.local);
    for (int q = 0; q < nfq; ++q) {
      Vec xi(dim_);
      int free_slot = 0;
      for (int d = 0; d < dim_; ++d) {
        if (d == def.fixed) {
          xi(d) = def.sign;
        } else {
          xi(d) = ((q >> free_slot) & 1) ? kGauss : -kGauss;
          ++free_slot;
        }
      }
      FacetPoint& p = fqps_[t * nfq + q];
      p.xi = xi;
      const double det = map(f.element, xi, p.x, p.n, p.dn);
      ShapeVal nn;
      ShapeGrad dref;
      shape(xi, nn, dref);
      Mat jac = Mat::Zero(dim_, dim_);
      for (int a = 0; a < nodes_per_element(); ++a) jac += nodes_[elements_[f.element][a]] * dref.col(a).transpose();
      // Nanson: outward normal along J^-T e_fixed, area element det J |J^-T e|.
      const Vec m = jac.transpose().inverse().col(def.fixed) * static_cast<double>(def.sign);
      p.normal = m / m.norm();
      p.weight = det * m.norm();
    }
  }
}

void Mesh::finalize(const std::function<bool(const Facet&, const Mesh&)>& is_dirichlet) {
  const int nf = dim_ == 2 ? 4 : 6;
  const int nfn = nodes_per_facet();
  std::map<std::array<int, 4>, std::pair<int, Facet>> seen;
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    for (int l = 0; l < nf; ++l) {
      Facet f;
      f.element = static_cast<long>(e);
      f.local = l;
      for (int k = 0; k < nfn; ++k) f.nodes[k] = elements_[e][face_def(dim_, l).local[k]];
      auto [it, inserted] = seen.try_emplace(sorted_key(f, nfn), 0, f);
      it->second.first += 1;
    }
  }
  facets_.clear();
  for (const auto& [key, entry] : seen) {
    if (entry.first > 2) fail(ErrorCode::ConfigError, "non-conforming mesh: facet shared by more than two elements");
    if (entry.first == 1) facets_.push_back(entry.second);
  }
  std::sort(facets_.begin(), facets_.end(),
            [](const Facet& a, const Facet& b) { return std::tie(a.element, a.local) < std::tie(b.element, b.local); });
  dirichlet_.clear();
  traction_.clear();
  for (std::size_t i = 0; i < facets_.size(); ++i) (is_dirichlet(facets_[i], *this) ? dirichlet_ : traction_).push_back(static_cast<int>(i));
  dirichlet_mask_.assign(nodes_.size(), 0);
  for (int fi : dirichlet_)
    for (int k = 0; k < nfn; ++k) dirichlet_mask_[facets_[fi].nodes[k]] = 1;
  dirichlet_nodes_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (dirichlet_mask_[i]) dirichlet_nodes_.push_back(static_cast<int>(i));
  compute_quadrature();
}

Mesh Mesh::build(int dim, std::vector<Vec> nodes, std::vector<std::array<int, 8>> elements,
                 const std::function<bool(const Facet&, const Mesh&)>& is_dirichlet) {
  if (dim != 2 && dim != 3) fail(ErrorCode::DimensionMismatch, "mesh dimension must be 2 or 3");
  if (elements.empty()) fail(ErrorCode::ConfigError, "mesh has no elements");
  Mesh m;
  m.dim_ = dim;
  m.nodes_ = std::move(nodes);
  m.elements_ = std::move(elements);
  const int nen = m.nodes_per_element();
  for (const Vec& x : m.nodes_)
    if (x.size() != dim) fail(ErrorCode::DimensionMismatch, "node coordinate count differs from mesh dimension");
  for (const auto& el : m.elements_)
    for (int a = 0; a < nen; ++a)
      if (el[a] < 0 || el[a] >= static_cast<int>(m.nodes_.size())) fail(ErrorCode::ConfigError, "element node index out of range");
  m.finalize(is_dirichlet);
  return m;
}

double Mesh::volume() const {
  double v = 0;
  for (const QuadPoint& p : qps_) v += p.weight;
  return v;
}

Mesh Mesh::with_nodes(std::vector<Vec> nodes) const {
  if (nodes.size() != nodes_.size()) fail(ErrorCode::DimensionMismatch, "node count changed");
  Mesh m = *this;
  m.nodes_ = std::move(nodes);
  m.compute_quadrature();
  return m;
}

Mesh Mesh::with_dirichlet(const std::function<bool(const Facet&, const Mesh&)>& is_dirichlet) const {
  Mesh m = *this;
  m.finalize(is_dirichlet);
  return m;
}

Vec Mesh::facet_midpoint(const Facet& f) const {
  Vec c = Vec::Zero(dim_);
  for (int k = 0; k < nodes_per_facet(); ++k) c += nodes_[f.nodes[k]];
  return c / nodes_per_facet();
}

std::function<bool(const Facet&, const Mesh&)> select_sides(const std::string& sides) {
  std::vector<std::string> names;
  std::stringstream ss(sides);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) continue;
    static const char* known[] = {"left", "right", "bottom", "top", "front", "back", "outer", "inner", "all", "none"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return tok == k; }) == std::end(known))
      fail(ErrorCode::ConfigError, "unknown boundary side '" + tok + "'");
    names.push_back(tok);
  }
  return [names](const Facet& f, const Mesh& m) {
    const int n = m.dim();
    Vec lo = m.nodes().front(), hi = m.nodes().front();
    for (const Vec& x : m.nodes()) lo = lo.cwiseMin(x), hi = hi.cwiseMax(x);
    const double tol = 1e-9 * (hi - lo).norm();
    auto on_plane = [&](int d, double value) {
      for (int k = 0; k < m.nodes_per_facet(); ++k)
        if (std::abs(m.nodes()[f.nodes[k]](d) - value) > tol) return false;
      return true;
    };
    auto on_box = [&] {
      for (int d = 0; d < n; ++d)
        if (on_plane(d, lo(d)) || on_plane(d, hi(d))) return true;
      return false;
    };
    for (const std::string& s : names) {
      if (s == "all") return true;
      if (s == "left" && on_plane(0, lo(0))) return true;
      if (s == "right" && on_plane(0, hi(0))) return true;
      if (s == "bottom" && on_plane(1, lo(1))) return true;
      if (s == "top" && on_plane(1, hi(1))) return true;
      if (s == "front" && n == 3 && on_plane(2, lo(2))) return true;
      if (s == "back" && n == 3 && on_plane(2, hi(2))) return true;
      if (s == "outer" && on_box()) return true;
      if (s == "inner" && !on_box()) return true;
    }
    return false;
  };
}

namespace {

// Structured 2D mesh over the cells of an nx x ny lattice kept by `keep`.
Mesh lattice_mesh_2d(int nx, int ny, double hx, double hy, const std::function<bool(int, int)>& keep,
                     const std::string& sides) {
  std::vector<int> id((nx + 1) * (ny + 1), -1);
  std::vector<Vec> nodes;
  std::vector<std::array<int, 8>> elements;
  Lattice lat;
  lat.spacing = hx;
  lat.extent = {nx, ny, 1};
  auto node = [&](int i, int j) {
    int& slot = id[j * (nx + 1) + i];
    if (slot < 0) {
      slot = static_cast<int>(nodes.size());
      Vec x(2);
      x << i * hx, j * hy;
      nodes.push_back(x);
    }
    return slot;
  };
  // Nodes are numbered row by row before elements so numbering is stable.
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      bool used = false;
      for (int dj = -1; dj <= 0; ++dj)
        for (int di = -1; di <= 0; ++di) {
          const int ci = i + di, cj = j + dj;
          if (ci >= 0 && cj >= 0 && ci < nx && cj < ny && keep(ci, cj)) used = true;
        }
      if (used) node(i, j);
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!keep(i, j)) continue;
      elements.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1), -1, -1, -1, -1});
      lat.cell.push_back({i, j, 0});
    }
  Mesh m = Mesh::build(2, std::move(nodes), std::move(elements), select_sides(sides));
  if (std::abs(hx - hy) <= 1e-14 * hx) m.set_lattice(std::move(lat));
  return m;
}

}  // namespace

Mesh rectangle_mesh(int nx, int ny, double lx, double ly, const std::string& sides) {
  if (nx < 1 || ny < 1 || !(lx > 0) || !(ly > 0)) fail(ErrorCode::ConfigError, "bad rectangle mesh size");
  return lattice_mesh_2d(nx, ny, lx / nx, ly / ny, [](int, int) { return true; }, sides);
}

Mesh box_mesh(int nx, int ny, int nz, double lx, double ly, double lz, const std::string& sides) {
  if (nx < 1 || ny < 1 || nz < 1) fail(ErrorCode::ConfigError, "bad box mesh size");
  std::vector<Vec> nodes;
  auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        Vec x(3);
        x << lx * i / nx, ly * j / ny, lz * k / nz;
        nodes.push_back(x);
      }
  std::vector<std::array<int, 8>> elements;
  Lattice lat;
  lat.extent = {nx, ny, nz};
  lat.spacing = lx / nx;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        elements.push_back({id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k), id(i, j, k + 1),
                            id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)});
        lat.cell.push_back({i, j, k});
      }
  Mesh m = Mesh::build(3, std::move(nodes), std::move(elements), select_sides(sides));
  const double h = lx / nx;
  if (std::abs(ly / ny - h) <= 1e-14 * h && std::abs(lz / nz - h) <= 1e-14 * h) m.set_lattice(std::move(lat));
  return m;
}

Mesh l_shape_mesh(int n, double l, const std::string& sides) {
  if (n < 2 || n % 2) fail(ErrorCode::ConfigError, "L-shape needs an even cell count");
  Mesh m = lattice_mesh_2d(n, n, l / n, l / n, [n](int i, int j) { return i < n / 2 || j < n / 2; }, sides);
  return m;
}

Mesh square_annulus_mesh(int n, double l, const std::string& sides) {
  if (n < 4 || n % 4) fail(ErrorCode::ConfigError, "square annulus needs a cell count divisible by 4");
  return lattice_mesh_2d(
      n, n, l / n, l / n, [n](int i, int j) { return i < n / 4 || i >= 3 * n / 4 || j < n / 4 || j >= 3 * n / 4; }, sides);
}

// --- text format --------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

std::size_t header(std::istream& in, const char* key) {
  std::string line, word;
  if (!next_line(in, line)) fail(ErrorCode::ParseError, std::string("missing '") + key + "' section");
  std::istringstream ls(line);
  long count = -1;
  if (!(ls >> word >> count) || word != key || count < 0) fail(ErrorCode::ParseError, std::string("expected '") + key + " <count>'");
  return static_cast<std::size_t>(count);
}

std::vector<double> numbers(const std::string& line) {
  std::vector<double> out;
  std::istringstream ls(line);
  std::string tok;
  while (ls >> tok) {
    double v = 0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) fail(ErrorCode::ParseError, "bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::array<int, 4>> facet_list(std::istream& in, const char* key, int per) {
  const std::size_t count = header(in, key);
  std::vector<std::array<int, 4>> out;
  std::string line;
  for (std::size_t i = 0; i < count; ++i) {
    if (!next_line(in, line)) fail(ErrorCode::ParseError, std::string("truncated ") + key + " list");
    const auto v = numbers(line);
    if (static_cast<int>(v.size()) != per) fail(ErrorCode::ParseError, std::string(key) + " facet has wrong node count");
    std::array<int, 4> f{-1, -1, -1, -1};
    for (int k = 0; k < per; ++k) f[k] = static_cast<int>(v[k]);
    std::sort(f.begin(), f.begin() + per);
    out.push_back(f);
  }
  return out;
}

// Recovers lattice coordinates when every element is an axis-aligned cell of
// one common size.
std::optional<Lattice> infer_lattice(const Mesh& m) {
  const int n = m.dim();
  Vec lo = m.nodes().front();
  for (const Vec& x : m.nodes()) lo = lo.cwiseMin(x);
  double h = -1;
  Lattice lat;
  lat.extent = {0, 0, 1};
  for (const auto& el : m.elements()) {
    Vec emin = m.nodes()[el[0]], emax = emin;
    for (int a = 0; a < m.nodes_per_element(); ++a) emin = emin.cwiseMin(m.nodes()[el[a]]), emax = emax.cwiseMax(m.nodes()[el[a]]);
    const Vec side = emax - emin;
    if (h < 0) h = side(0);
    for (int d = 0; d < n; ++d)
      if (std::abs(side(d) - h) > 1e-12 * h) return std::nullopt;
    std::array<int, 3> c{0, 0, 0};
    for (int d = 0; d < n; ++d) {
      const double r = (emin(d) - lo(d)) / h;
      c[d] = static_cast<int>(std::lround(r));
      if (std::abs(r - c[d]) > 1e-9) return std::nullopt;
      lat.extent[d] = std::max(lat.extent[d], c[d] + 1);
    }
    // corners must sit exactly on the cell corners
    for (int a = 0; a < m.nodes_per_element(); ++a) {
      const Vec& x = m.nodes()[el[a]];
      for (int d = 0; d < n; ++d)
        if (std::abs(x(d) - emin(d)) > 1e-12 * h && std::abs(x(d) - emax(d)) > 1e-12 * h) return std::nullopt;
    }
    lat.cell.push_back(c);
  }
  lat.spacing = h;
  for (int d = 0; d < n; ++d) lat.origin[d] = lo(d);
  return lat;
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  const std::size_t nn = header(in, "nodes");
  std::vector<Vec> nodes;
  std::string line;
  int dim = 0;
  for (std::size_t i = 0; i < nn; ++i) {
    if (!next_line(in, line)) fail(ErrorCode::ParseError, "truncated node list");
    const auto v = numbers(line);
    if (i == 0) dim = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != dim || (dim != 2 && dim != 3)) fail(ErrorCode::ParseError, "node line has wrong coordinate count");
    Vec x(dim);
    for (int d = 0; d < dim; ++d) x(d) = v[d];
    nodes.push_back(x);
  }
  const int nen = dim == 2 ? 4 : 8;
  const std::size_t ne = header(in, "elements");
  std::vector<std::array<int, 8>> elements;
  for (std::size_t i = 0; i < ne; ++i) {
    if (!next_line(in, line)) fail(ErrorCode::ParseError, "truncated element list");
    const auto v = numbers(line);
    if (static_cast<int>(v.size()) != nen) fail(ErrorCode::ParseError, "element has wrong node count");
    std::array<int, 8> el{-1, -1, -1, -1, -1, -1, -1, -1};
    for (int a = 0; a < nen; ++a) el[a] = static_cast<int>(v[a]);
    elements.push_back(el);
  }
  const int per = dim == 2 ? 2 : 4;
  const auto d = facet_list(in, "dirichlet", per);
  const auto s = facet_list(in, "traction", per);
  auto key = [per](const Facet& f) {
    std::array<int, 4> k = f.nodes;
    std::sort(k.begin(), k.begin() + per);
    return k;
  };
  Mesh m = Mesh::build(dim, std::move(nodes), std::move(elements), [&](const Facet& f, const Mesh&) {
    return std::find(d.begin(), d.end(), key(f)) != d.end();
  });
  if (m.dirichlet_facets().size() != d.size()) fail(ErrorCode::ConfigError, "a dirichlet facet is not on the boundary");
  if (m.traction_facets().size() != s.size()) fail(ErrorCode::ConfigError, "dirichlet and traction lists must partition the boundary");
  for (int t : m.traction_facets())
    if (std::find(s.begin(), s.end(), key(m.facets()[t])) == s.end())
      fail(ErrorCode::ConfigError, "boundary facet missing from both lists");
  if (auto lat = infer_lattice(m)) m.set_lattice(std::move(*lat));
  return m;
}

void write_mesh(std::ostream& out, const Mesh& m) {
  out << "nodes " << m.node_count() << '\n';
  for (const Vec& x : m.nodes()) {
    for (int d = 0; d < m.dim(); ++d) out << (d ? " " : "") << fmt(x(d));
    out << '\n';
  }
  out << "elements " << m.element_count() << '\n';
  for (const auto& el : m.elements()) {
    for (int a = 0; a < m.nodes_per_element(); ++a) out << (a ? " " : "") << el[a];
    out << '\n';
  }
  auto facets = [&](const char* key, const std::vector<int>& list) {
    out << key << ' ' << list.size() << '\n';
    for (int fi : list) {
      for (int k = 0; k < m.nodes_per_facet(); ++k) out << (k ? " " : "") << m.facets()[fi].nodes[k];
      out << '\n';
    }
  };
  facets("dirichlet", m.dirichlet_facets());
  facets("traction", m.traction_facets());
}

std::string mesh_hash(const Mesh& m) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&h](const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  const int dim = m.dim();
  feed(&dim, sizeof dim);
  for (const Vec& x : m.nodes())
    for (int d = 0; d < dim; ++d) {
      const double v = x(d);
      feed(&v, sizeof v);
    }
  for (const auto& el : m.elements()) feed(el.data(), sizeof(int) * m.nodes_per_element());
  for (int f : m.dirichlet_facets()) feed(&f, sizeof f);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rigcert
