// Copyright 2026 The qtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtraj/kraus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "qtraj/error.hpp"

namespace qtraj {
namespace {

ComplexMatrix stochastic_sum(const std::vector<KrausElement>& elements, int dim) {
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& e : elements) sum += e.weight * (e.matrix.adjoint() * e.matrix);
  return sum;
}

double param(const ModelParams& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void check_known_params(const std::string& model, const ModelParams& params,
                        std::initializer_list<const char*> known) {
  for (const auto& [key, value] : params) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) {
      throw Error(ErrorKind::kInvalidParameter,
                  model + ": unknown parameter '" + key + "'");
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::kInvalidParameter,
                  model + ": parameter '" + key + "' is not finite");
    }
  }
}

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

[[noreturn]] void parse_fail(const std::string& context, const std::string& field,
                             const std::string& message) {
  throw Error(ErrorKind::kParse, context + ": " + field + ": " + message);
}

double read_number(const nlohmann::json& j, const std::string& context,
                   const std::string& field) {
  if (!j.is_number()) parse_fail(context, field, "expected a number");
  return j.get<double>();
}

}  // namespace

KrausMeasure::KrausMeasure(std::vector<KrausElement> elements, std::string name,
                           double tolerance)
    : elements_(std::move(elements)), name_(std::move(name)), tolerance_(tolerance) {
  if (elements_.empty()) {
    throw Error(ErrorKind::kInvalidModel, "Kraus measure has no elements");
  }
  dim_ = static_cast<int>(elements_.front().matrix.rows());
  if (dim_ < 1) throw Error(ErrorKind::kInvalidModel, "Kraus matrices must be non-empty");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const auto& e = elements_[i];
    const std::string where = "element " + std::to_string(i);
    if (e.matrix.rows() != dim_ || e.matrix.cols() != dim_) {
      throw Error(ErrorKind::kInvalidModel, where + ": matrix is not " +
                                                std::to_string(dim_) + "x" +
                                                std::to_string(dim_));
    }
    if (!numerics::all_finite(e.matrix)) {
      throw Error(ErrorKind::kInvalidModel, where + ": non-finite matrix entry");
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw Error(ErrorKind::kInvalidModel, where + ": weight must be finite and >= 0");
    }
    if (e.weight > 0.0 && e.matrix.norm() > 0.0) support_.push_back(static_cast<int>(i));
  }
  defect_ = (stochastic_sum(elements_, dim_) - ComplexMatrix::Identity(dim_, dim_)).norm();
}

void KrausMeasure::require_stochastic() const {
  if (!is_stochastic()) {
    std::ostringstream msg;
    msg << "Kraus measure '" << name_ << "' violates sum w v*v = Id: defect "
        << defect_ << " exceeds tolerance " << tolerance_;
    throw Error(ErrorKind::kInvalidModel, msg.str());
  }
}

ValidationReport validate(const KrausMeasure& m, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::kInvalidInput, "validate: tolerance must be > 0");
  ValidationReport report;
  report.defect = m.defect();
  report.tolerance = tol;
  report.passed = m.defect() <= tol;
  for (const auto& e : m.elements()) report.second_moment += e.weight * e.matrix.squaredNorm();
  return report;
}

KrausMeasure repair_weights(const KrausMeasure& m) {
  if (m.defect() >= 1e-6) {
    std::ostringstream msg;
    msg << "repair_weights: defect " << m.defect() << " too large to repair";
    throw Error(ErrorKind::kInvalidModel, msg.str());
  }
  const ComplexMatrix sum = stochastic_sum(m.elements(), m.dim());
  const double mean_eig = sum.trace().real() / m.dim();
  std::vector<KrausElement> scaled = m.elements();
  for (auto& e : scaled) e.weight /= mean_eig;
  return KrausMeasure(std::move(scaled), m.name(), m.tolerance());
}

TransitionDistribution transition_probabilities(const KrausMeasure& m,
                                                const ProjectivePoint& x) {
  m.require_stochastic();
  if (x.dim() != m.dim()) {
    throw Error(ErrorKind::kInvalidInput, "transition_probabilities: dimension mismatch");
  }
  TransitionDistribution out;
  out.probabilities.reserve(m.size());
  for (const auto& e : m.elements()) {
    out.probabilities.push_back(e.weight * (e.matrix * x.vector()).squaredNorm());
  }
  return out;
}

std::vector<std::string> builtin_model_names() {
  return {"appc_example1", "appc_example2", "flip_flop", "amplitude_damping",
          "rotating_damping"};
}

KrausMeasure builtin_model(const std::string& name, const ModelParams& params) {
  const Complex i(0.0, 1.0);
  std::vector<KrausElement> elements;
  std::string label = name;
  if (name == "appc_example1") {
    check_known_params(name, params, {});
    elements.push_back({0.5, mat2(std::exp(i), 0.0, 0.0, std::exp(-i))});
    elements.push_back({0.5, mat2(std::cos(1.0), i * std::sin(1.0), i * std::sin(1.0),
                                  std::cos(1.0))});
  } else if (name == "appc_example2") {
    check_known_params(name, params, {});
    elements.push_back({0.5, mat2(i, 0.0, 0.0, -i)});
    elements.push_back({0.5, mat2(0.0, i, i, 0.0)});
  } else if (name == "flip_flop") {
    check_known_params(name, params, {});
    elements.push_back({1.0, mat2(0.0, 1.0, 0.0, 0.0)});
    elements.push_back({1.0, mat2(0.0, 0.0, 1.0, 0.0)});
  } else if (name == "amplitude_damping") {
    check_known_params(name, params, {"p"});
    const double p = param(params, "p", 0.5);
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::kInvalidParameter, "amplitude_damping: p must lie in [0, 1]");
    }
    elements.push_back({1.0, mat2(1.0, 0.0, 0.0, std::sqrt(1.0 - p))});
    elements.push_back({1.0, mat2(0.0, std::sqrt(p), 0.0, 0.0)});
    std::ostringstream os;
    os << name << "(p=" << p << ")";
    label = os.str();
  } else if (name == "rotating_damping") {
    check_known_params(name, params, {"theta", "a", "b"});
    const double theta = param(params, "theta", std::numbers::pi / 4.0);
    const double a = param(params, "a", 0.8);
    const double b = param(params, "b", 0.6);
    if (std::abs(a) > 1.0 || std::abs(b) > 1.0) {
      throw Error(ErrorKind::kInvalidParameter, "rotating_damping: |a| and |b| must be <= 1");
    }
    const ComplexMatrix rot = mat2(std::cos(theta), -std::sin(theta), std::sin(theta),
                                   std::cos(theta));
    elements.push_back({1.0, mat2(a, 0.0, 0.0, b)});
    elements.push_back(
        {1.0, rot * mat2(std::sqrt(1.0 - a * a), 0.0, 0.0, std::sqrt(1.0 - b * b))});
    std::ostringstream os;
    os << name << "(theta=" << theta << ",a=" << a << ",b=" << b << ")";
    label = os.str();
  } else {
    throw Error(ErrorKind::kInvalidParameter, "unknown builtin model '" + name + "'");
  }
  return KrausMeasure(std::move(elements), label);
}

nlohmann::json to_json(const KrausMeasure& m) {
  nlohmann::json j;
  j["dim"] = m.dim();
  j["name"] = m.name();
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& e : m.elements()) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.dim(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < m.dim(); ++c) {
        row.push_back({e.matrix(r, c).real(), e.matrix(r, c).imag()});
      }
      rows.push_back(std::move(row));
    }
    elements.push_back({{"weight", e.weight}, {"matrix", std::move(rows)}});
  }
  j["elements"] = std::move(elements);
  return j;
}

KrausMeasure from_json(const nlohmann::json& j, double tol, bool allow_invalid,
                       const std::string& context) {
  if (!j.is_object()) parse_fail(context, "<root>", "expected an object");
  if (!j.contains("dim")) parse_fail(context, "dim", "missing field");
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    parse_fail(context, "dim", "expected a positive integer");
  }
  const int dim = j["dim"].get<int>();
  std::string name;
  if (j.contains("name")) {
    if (!j["name"].is_string()) parse_fail(context, "name", "expected a string");
    name = j["name"].get<std::string>();
  }
  if (!j.contains("elements") || !j["elements"].is_array()) {
    parse_fail(context, "elements", "expected an array");
  }
  std::vector<KrausElement> elements;
  const auto& arr = j["elements"];
  for (std::size_t n = 0; n < arr.size(); ++n) {
    const std::string base = "elements[" + std::to_string(n) + "]";
    const auto& el = arr[n];
    if (!el.is_object()) parse_fail(context, base, "expected an object");
    KrausElement e;
    e.weight = el.contains("weight") ? read_number(el["weight"], context, base + ".weight")
                                     : 1.0;
    if (!el.contains("matrix") || !el["matrix"].is_array()) {
      parse_fail(context, base + ".matrix", "expected an array of rows");
    }
    const auto& rows = el["matrix"];
    if (rows.size() != static_cast<std::size_t>(dim)) {
      parse_fail(context, base + ".matrix",
                 "expected " + std::to_string(dim) + " rows, got " +
                     std::to_string(rows.size()));
    }
    e.matrix.resize(dim, dim);
    for (int r = 0; r < dim; ++r) {
      const std::string rname = base + ".matrix[" + std::to_string(r) + "]";
      if (!rows[r].is_array() || rows[r].size() != static_cast<std::size_t>(dim)) {
        parse_fail(context, rname, "expected " + std::to_string(dim) + " entries");
      }
      for (int c = 0; c < dim; ++c) {
        const std::string ename = rname + "[" + std::to_string(c) + "]";
        const auto& z = rows[r][c];
        if (!z.is_array() || z.size() != 2) {
          parse_fail(context, ename, "expected a [re, im] pair");
        }
        e.matrix(r, c) = Complex(read_number(z[0], context, ename + "[0]"),
                                 read_number(z[1], context, ename + "[1]"));
      }
    }
    elements.push_back(std::move(e));
  }
  if (elements.empty()) throw Error(ErrorKind::kInvalidModel, context + ": no elements");
  KrausMeasure m(std::move(elements), name, tol);
  if (!m.is_stochastic()) {
    if (!allow_invalid) {
      std::ostringstream msg;
      msg << context << ": stochasticity defect " << m.defect() << " exceeds tolerance "
          << tol;
      throw Error(ErrorKind::kInvalidModel, msg.str());
    }
    return KrausMeasure(m.elements(), m.name(), std::numeric_limits<double>::infinity());
  }
  return m;
}

KrausMeasure load_model(const std::string& path, double tol, bool allow_invalid) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open model file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, path + ": line " +
                                       std::to_string(line_of_offset(text, e.byte)) + ": " +
                                       e.what());
  }
  return from_json(j, tol, allow_invalid, path);
}

void save_model(const KrausMeasure& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write model file '" + path + "'");
  out << to_json(m).dump(2) << '\n';
}

KrausMeasure resolve_model(const std::string& reference, double tol, bool allow_invalid) {
  if (std::filesystem::exists(reference)) return load_model(reference, tol, allow_invalid);
  const auto colon = reference.find(':');
  const std::string name = reference.substr(0, colon);
  ModelParams params;
  if (colon != std::string::npos) {
    std::stringstream list(reference.substr(colon + 1));
    std::string item;
    while (std::getline(list, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorKind::kInvalidParameter,
                    "model parameter '" + item + "' is not of the form key=value");
      }
      try {
        params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kInvalidParameter, "model parameter '" + item + "' is not a number");
      }
    }
  }
  const auto names = builtin_model_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw Error(ErrorKind::kInvalidInput,
                "'" + reference + "' is neither a model file nor a builtin model");
  }
  return builtin_model(name, params);
}

}  // namespace qtraj
