#include "podsurf/error.hpp"
#include "podsurf/io.hpp"
#include "podsurf/rom.hpp"

#include <json.hpp>

#include <string>

namespace podsurf {

using nlohmann::json;

namespace {

// Matrices are stored as flat row-major lists; the shape lives in sibling keys.
json flat(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

json flat(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

const json& at(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(ErrorCode::SchemaMismatch, std::string("model file lacks key '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const auto& v = at(j, key);
  if (!v.is_number()) fail(ErrorCode::SchemaMismatch, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::size_t count(const json& j, const char* key) {
  const auto& v = at(j, key);
  if (!v.is_number_unsigned())
    fail(ErrorCode::SchemaMismatch, std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

Eigen::VectorXd vector_of(const json& v, std::size_t expected, const char* what) {
  if (!v.is_array() || v.size() != expected)
    fail(ErrorCode::SchemaMismatch, std::string("'") + what + "' has the wrong length");
  Eigen::VectorXd out(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) {
    if (!v[i].is_number()) fail(ErrorCode::SchemaMismatch, std::string("'") + what + "' holds a non-number");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Eigen::MatrixXd matrix_of(const json& v, std::size_t rows, std::size_t cols, const char* what) {
  const auto flat_values = vector_of(v, rows * cols, what);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          flat_values[static_cast<Eigen::Index>(i * cols + j)];
  return out;
}

json truncation_json(const Truncation& t) {
  if (const auto* r = std::get_if<RankTruncation>(&t)) return {{"kind", "rank"}, {"value", r->rank}};
  return {{"kind", "energy"}, {"value", std::get<EnergyTruncation>(t).fraction}};
}

Truncation truncation_from(const json& j) {
  const auto& kind = at(j, "kind");
  if (kind == "rank") return RankTruncation{count(j, "value")};
  if (kind == "energy") return EnergyTruncation{number(j, "value")};
  fail(ErrorCode::SchemaMismatch, "unknown truncation kind");
}

json regressor_json(const Regressor& r) {
  struct {
    json operator()(const GprModel& m) const {
      json outputs = json::array();
      for (const auto& o : m.outputs)
        outputs.push_back({{"length_scale", o.length_scale},
                           {"output_scale", o.output_scale},
                           {"noise", o.noise},
                           {"jitter", o.jitter},
                           {"y_mean", o.y_mean},
                           {"y_std", o.y_std},
                           {"log_likelihood", o.log_likelihood},
                           {"alpha", flat(o.alpha)},
                           {"chol", flat(o.chol)}});
      return {{"kind", "gpr"},
              {"n_train", m.train_inputs.rows()},
              {"train_inputs", flat(m.train_inputs)},
              {"outputs", outputs}};
    }
    json operator()(const RbfModel& m) const {
      return {{"kind", "rbf"},
              {"kernel", m.kernel == RbfKernel::Multiquadric ? "multiquadric" : "thin-plate"},
              {"epsilon", m.epsilon},
              {"smoothness", m.smoothness},
              {"n_train", m.train_inputs.rows()},
              {"train_inputs", flat(m.train_inputs)},
              {"weights", flat(m.weights)}};
    }
    json operator()(const LinearNdModel& m) const {
      json tris = json::array();
      for (const auto& t : m.triangles) tris.push_back({t[0], t[1], t[2]});
      return {{"kind", "linear"},
              {"n_train", m.train_inputs.rows()},
              {"train_inputs", flat(m.train_inputs)},
              {"train_outputs", flat(m.train_outputs)},
              {"triangles", tris},
              {"order", m.order}};
    }
  } visitor;
  return std::visit(visitor, r);
}

Regressor regressor_from(const json& j, const ParameterSpace& space, std::size_t rank) {
  const auto p = space.dims();
  const auto m = count(j, "n_train");
  const auto kind = at(j, "kind");
  const Eigen::MatrixXd inputs = matrix_of(at(j, "train_inputs"), m, p, "train_inputs");
  if (kind == "gpr") {
    GprModel model;
    model.space = space;
    model.train_inputs = inputs;
    const auto& outs = at(j, "outputs");
    if (!outs.is_array() || outs.size() != rank)
      fail(ErrorCode::SchemaMismatch, "GPR output count differs from basis rank");
    for (const auto& o : outs) {
      GprOutput g;
      g.length_scale = number(o, "length_scale");
      g.output_scale = number(o, "output_scale");
      g.noise = number(o, "noise");
      g.jitter = number(o, "jitter");
      g.y_mean = number(o, "y_mean");
      g.y_std = number(o, "y_std");
      g.log_likelihood = number(o, "log_likelihood");
      g.alpha = vector_of(at(o, "alpha"), m, "alpha");
      g.chol = matrix_of(at(o, "chol"), m, m, "chol");
      model.outputs.push_back(std::move(g));
    }
    return model;
  }
  if (kind == "rbf") {
    RbfModel model;
    model.space = space;
    model.train_inputs = inputs;
    const auto& kernel = at(j, "kernel");
    if (kernel == "multiquadric")
      model.kernel = RbfKernel::Multiquadric;
    else if (kernel == "thin-plate")
      model.kernel = RbfKernel::ThinPlateSpline;
    else
      fail(ErrorCode::SchemaMismatch, "unknown RBF kernel");
    model.epsilon = number(j, "epsilon");
    model.smoothness = number(j, "smoothness");
    model.weights = matrix_of(at(j, "weights"), m, rank, "weights");
    return model;
  }
  if (kind == "linear") {
    LinearNdModel model;
    model.space = space;
    model.train_inputs = inputs;
    model.train_outputs = matrix_of(at(j, "train_outputs"), m, rank, "train_outputs");
    const auto in_range = [m](const json& v) {
      return v.is_number_unsigned() && v.get<std::size_t>() < m;
    };
    for (const auto& t : at(j, "triangles")) {
      if (!t.is_array() || t.size() != 3 || !in_range(t[0]) || !in_range(t[1]) || !in_range(t[2]))
        fail(ErrorCode::SchemaMismatch, "malformed triangle");
      model.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
    for (const auto& k : at(j, "order")) {
      if (!in_range(k)) fail(ErrorCode::SchemaMismatch, "malformed order index");
      model.order.push_back(k.get<int>());
    }
    if ((p == 1 && model.order.size() != m) || (p == 2 && model.triangles.empty()) || p > 2)
      fail(ErrorCode::SchemaMismatch, "linear model geometry does not match p");
    return model;
  }
  fail(ErrorCode::SchemaMismatch, "unknown regressor kind");
}

}  // namespace

std::string model_to_json(const RomModel& rom) {
  json bounds = json::array();
  for (const auto& b : rom.space.bounds()) bounds.push_back({b.low, b.high});
  json basis = {{"n_dof", rom.n_dof()},
                {"rank", rom.rank()},
                {"modes", flat(rom.basis.modes)},
                {"singular_values", flat(rom.basis.singular_values)},
                {"full_spectrum", flat(rom.basis.full_spectrum)},
                {"mean", rom.basis.centered() ? flat(rom.basis.mean) : json(nullptr)}};
  json doc = {
      {"format_version", kModelFormatVersion},
      {"space", {{"bounds", bounds}}},
      {"basis", basis},
      {"regressor", regressor_json(rom.regressor)},
      {"weights", rom.weights ? flat(*rom.weights) : json(nullptr)},
      {"provenance",
       {{"n_train", rom.provenance.n_train},
        {"truncation", truncation_json(rom.provenance.truncation)},
        {"regressor_kind", rom.provenance.regressor_kind},
        {"seed", rom.provenance.seed},
        {"format_version", rom.provenance.format_version}}}};
  return doc.dump(1) + "\n";
}

RomModel model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    if (e.byte >= text.size())
      fail(ErrorCode::TruncatedFile, "model file ends early");
    fail(ErrorCode::SchemaMismatch, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    const auto& version = at(doc, "format_version");
    if (!version.is_number_integer()) fail(ErrorCode::SchemaMismatch, "format_version must be an integer");
    if (version.get<int>() != kModelFormatVersion)
      fail(ErrorCode::VersionUnsupported, "model format version " + version.dump());

    RomModel rom;
    std::vector<Bound> bounds;
    for (const auto& b : at(at(doc, "space"), "bounds")) {
      if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
        fail(ErrorCode::SchemaMismatch, "bounds must be [low, high] pairs");
      bounds.push_back({b[0].get<double>(), b[1].get<double>()});
    }
    try {
      rom.space = ParameterSpace(std::move(bounds));
    } catch (const Error& e) {
      fail(ErrorCode::SchemaMismatch, std::string("invalid parameter space: ") + e.what());
    }

    const auto& basis = at(doc, "basis");
    const auto n_dof = count(basis, "n_dof");
    const auto rank = count(basis, "rank");
    if (n_dof < 1 || rank < 1) fail(ErrorCode::SchemaMismatch, "basis must be non-empty");
    rom.basis.modes = matrix_of(at(basis, "modes"), n_dof, rank, "modes");
    rom.basis.singular_values = vector_of(at(basis, "singular_values"), rank, "singular_values");
    const auto& spectrum = at(basis, "full_spectrum");
    if (!spectrum.is_array() || spectrum.size() < rank)
      fail(ErrorCode::SchemaMismatch, "full_spectrum shorter than rank");
    rom.basis.full_spectrum = vector_of(spectrum, spectrum.size(), "full_spectrum");
    if (!at(basis, "mean").is_null()) rom.basis.mean = vector_of(at(basis, "mean"), n_dof, "mean");

    if (!at(doc, "weights").is_null()) rom.weights = vector_of(at(doc, "weights"), n_dof, "weights");

    const auto& prov = at(doc, "provenance");
    rom.provenance.n_train = count(prov, "n_train");
    rom.provenance.truncation = truncation_from(at(prov, "truncation"));
    const auto& kind = at(prov, "regressor_kind");
    if (!kind.is_string()) fail(ErrorCode::SchemaMismatch, "regressor_kind must be a string");
    rom.provenance.regressor_kind = kind.get<std::string>();
    rom.provenance.seed = at(prov, "seed").get<std::uint64_t>();
    rom.provenance.format_version = at(prov, "format_version").get<int>();

    rom.regressor = regressor_from(at(doc, "regressor"), rom.space, rank);
    return rom;
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaMismatch, std::string("model file schema: ") + e.what());
  }
}

void save_model(const RomModel& rom, const std::filesystem::path& path) {
  io::write_file_atomic(path, model_to_json(rom));
}

RomModel load_model(const std::filesystem::path& path) { return model_from_json(io::read_file(path)); }

}  // namespace podsurf
