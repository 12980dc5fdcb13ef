//==============================================================================
// Copyright (c) 2026 The tcgat Authors.
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
//==============================================================================
#include "tcgat/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tcgat/error.hpp"

namespace tcgat {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kNoContext: return "no-context";
    case Variant::kNoEquilibrium: return "no-equilibrium";
    case Variant::kTGATOnly: return "tgat-only";
    case Variant::kCGATOnly: return "cgat-only";
    case Variant::kContextOnly: return "context-only";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (auto v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  fail(ErrorKind::kValidation, "unknown variant \"" + std::string(name) + "\"");
}

std::string_view mask_mode_name(MaskMode mode) {
  return mode == MaskMode::kLiteral ? "literal" : "renormalize";
}

MaskMode parse_mask_mode(std::string_view name) {
  if (name == "renormalize") return MaskMode::kRenormalize;
  if (name == "literal") return MaskMode::kLiteral;
  fail(ErrorKind::kValidation, "unknown mask mode \"" + std::string(name) + "\"");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename U>
U parse_number(std::string_view key, std::string_view value) {
  U out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorKind::kValidation, "config key " + std::string(key) + ": invalid value \"" + std::string(value) + "\"");
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void TrainConfig::set(std::string_view key, std::string_view value) {
  const auto size = [&](std::size_t& dst) { dst = parse_number<std::size_t>(key, value); };
  const auto real = [&](double& dst) { dst = parse_number<double>(key, value); };
  if (key == "max_len") size(max_len);
  else if (key == "batch_size") size(batch_size);
  else if (key == "lr") real(lr);
  else if (key == "embed.dim") size(embed_dim);
  else if (key == "bilstm.hidden") size(bilstm_hidden);
  else if (key == "epochs") size(epochs);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "patience") size(patience);
  else if (key == "plateau_tolerance") real(plateau_tolerance);
  else if (key == "clip_norm") real(clip_norm);
  else if (key == "variant") variant = parse_variant(value);
  else if (key == "tgat.dim") size(tgat_dim);
  else if (key == "tgat.heads") size(tgat_heads);
  else if (key == "tgat.dropout") real(tgat_dropout);
  else if (key == "tgat.leaky_slope") real(tgat_leaky_slope);
  else if (key == "tgat.mask_mode") mask_mode = parse_mask_mode(value);
  else if (key == "cgat.dim") size(cgat_dim);
  else if (key == "cgat.heads") size(cgat_heads);
  else if (key == "cgat.dropout") real(cgat_dropout);
  else if (key == "cgat.leaky_slope") real(cgat_leaky_slope);
  else if (key == "fuse.dim") size(fuse_dim);
  else if (key == "split.train_fraction") real(train_fraction);
  else fail(ErrorKind::kValidation, "unknown config key \"" + std::string(key) + "\"");
}

void TrainConfig::validate() const {
  const auto positive = [](const char* key, double v) {
    if (!(v > 0.0)) fail(ErrorKind::kValidation, std::string("config key ") + key + " must be positive");
  };
  positive("max_len", static_cast<double>(max_len));
  positive("batch_size", static_cast<double>(batch_size));
  positive("embed.dim", static_cast<double>(embed_dim));
  positive("bilstm.hidden", static_cast<double>(bilstm_hidden));
  positive("epochs", static_cast<double>(epochs));
  positive("tgat.dim", static_cast<double>(tgat_dim));
  positive("tgat.heads", static_cast<double>(tgat_heads));
  positive("tgat.leaky_slope", tgat_leaky_slope);
  positive("cgat.dim", static_cast<double>(cgat_dim));
  positive("cgat.heads", static_cast<double>(cgat_heads));
  positive("cgat.leaky_slope", cgat_leaky_slope);
  positive("fuse.dim", static_cast<double>(fuse_dim));
  if (!(lr >= 0.0)) fail(ErrorKind::kValidation, "config key lr must be non-negative");
  if (!(clip_norm >= 0.0)) fail(ErrorKind::kValidation, "config key clip_norm must be non-negative");
  if (!(plateau_tolerance >= 0.0)) fail(ErrorKind::kValidation, "config key plateau_tolerance must be non-negative");
  for (auto [key, p] : {std::pair{"tgat.dropout", tgat_dropout}, {"cgat.dropout", cgat_dropout}}) {
    if (!(p >= 0.0 && p < 1.0)) fail(ErrorKind::kValidation, std::string("config key ") + key + " must be in [0, 1)");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail(ErrorKind::kValidation, "config key split.train_fraction must be in (0, 1)");
  }
}

std::map<std::string, std::string> TrainConfig::to_map() const {
  return {{"max_len", std::to_string(max_len)},
          {"batch_size", std::to_string(batch_size)},
          {"lr", format_double(lr)},
          {"embed.dim", std::to_string(embed_dim)},
          {"bilstm.hidden", std::to_string(bilstm_hidden)},
          {"epochs", std::to_string(epochs)},
          {"seed", std::to_string(seed)},
          {"patience", std::to_string(patience)},
          {"plateau_tolerance", format_double(plateau_tolerance)},
          {"clip_norm", format_double(clip_norm)},
          {"variant", std::string(variant_name(variant))},
          {"tgat.dim", std::to_string(tgat_dim)},
          {"tgat.heads", std::to_string(tgat_heads)},
          {"tgat.dropout", format_double(tgat_dropout)},
          {"tgat.leaky_slope", format_double(tgat_leaky_slope)},
          {"tgat.mask_mode", std::string(mask_mode_name(mask_mode))},
          {"cgat.dim", std::to_string(cgat_dim)},
          {"cgat.heads", std::to_string(cgat_heads)},
          {"cgat.dropout", format_double(cgat_dropout)},
          {"cgat.leaky_slope", format_double(cgat_leaky_slope)},
          {"fuse.dim", std::to_string(fuse_dim)},
          {"split.train_fraction", format_double(train_fraction)}};
}

TrainConfig TrainConfig::parse(std::string_view text) {
  TrainConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::kValidation, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      fail(e.kind(), "config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

TrainConfig TrainConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace tcgat
