#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rigcert/certify.hpp"
#include "rigcert/fem.hpp"
#include "rigcert/material.hpp"
#include "rigcert/solver.hpp"

namespace rigcert {

// Flat "key = value" text with '#' comments. Keys are dotted
// (mesh.generator, material.lambda, ...); each key may appear once.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<long> integers(const std::string& key, const std::vector<long>& fallback) const;

  // Throws ConfigError naming the line of the first key outside `allowed`.
  void require_known(const std::vector<std::string>& allowed) const;
  std::string where(const std::string& key) const;
  const std::filesystem::path& directory() const { return dir_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry& entry(const std::string& key) const;

  std::string source_;
  std::filesystem::path dir_;
  std::map<std::string, Entry> entries_;
};

enum class Pipeline {
  Solve,
  CertifyBmoGate,
  CertifySmallStrain,
  CertifyStrainDiff,
  DiagnosticsHarmonic,
  DiagnosticsRigidity,
  Korn,
};
std::string_view to_string(Pipeline p);

struct MeshSpec {
  std::string source = "generator";  // generator | file
  std::string generator = "rectangle";  // rectangle | l-shape | annulus | box
  std::filesystem::path file;
  std::array<int, 3> cells{8, 8, 8};
  std::array<double, 3> size{1, 1, 1};
  std::string dirichlet = "all";
};

struct MaterialSpec {
  std::string model = "stvk";
  double lambda = 1;
  double mu = 1;
  Modulation modulation;
};

// Dead loads: constant body force and traction; Dirichlet placement
// d(x) = F x + c.
struct LoadSpec {
  Vec body;
  Vec traction;
  Mat placement;
  Vec offset;
};

struct Scenario {
  std::string name;
  Pipeline pipeline = Pipeline::Solve;
  std::uint64_t seed = 1;
  MeshSpec mesh;
  MaterialSpec material;
  LoadSpec loads;
  SolveOptions solver;
  std::string initial = "placement";  // placement | identity
  CertifyOptions certify;
  // candidates for the certify pipelines: smooth fields vanishing on D,
  // one per amplitude
  std::vector<double> amplitudes;
  std::size_t candidate_modes = 1;
  // diagnostics-harmonic
  std::vector<long> grid_sizes;
  std::size_t fields = 0;
  std::vector<double> exponents_p;
  std::vector<double> exponents_q;
  // diagnostics-rigidity, korn
  std::vector<long> refinements;
  std::size_t perturbations = 0;
  double perturbation_amplitude = 0;
  double rigidity_p = 2;
  Mat korn_field;

  int dim() const { return mesh.generator == "box" ? 3 : 2; }
};

// Reads and validates a scenario. Throws ConfigError with the offending
// line and key. `seed_override` replaces the `seed` key and every seed
// derived from it.
Scenario load_scenario(const Config& cfg, std::optional<std::uint64_t> seed_override = std::nullopt);

Mesh build_mesh(const MeshSpec& spec, int cells_override = 0);
std::unique_ptr<Material> build_material(const MaterialSpec& spec);
LoadSet build_loads(const Mesh& mesh, const LoadSpec& spec);
FeField placement_field(const Mesh& mesh, const LoadSpec& spec);

}  // namespace rigcert
