// Copyright 2026 The dbp Authors.
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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "dbp/errors.hpp"
#include "dbp/model.hpp"
#include "dbp/types.hpp"

namespace dbp {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

}  // namespace

std::string_view to_string(EqualizerKind kind) {
  switch (kind) {
    case EqualizerKind::MRC: return "MRC";
    case EqualizerKind::ZF: return "ZF";
    case EqualizerKind::LMMSE: return "L-MMSE";
    case EqualizerKind::LAMA: return "LAMA";
  }
  return "?";
}

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::Centralized: return "Centralized";
    case Architecture::PD: return "PD";
    case Architecture::FD: return "FD";
  }
  return "?";
}

std::optional<EqualizerKind> parse_equalizer_kind(std::string_view text) {
  const auto s = lower(text);
  if (s == "mrc") return EqualizerKind::MRC;
  if (s == "zf") return EqualizerKind::ZF;
  if (s == "lmmse" || s == "l-mmse" || s == "mmse") return EqualizerKind::LMMSE;
  if (s == "lama") return EqualizerKind::LAMA;
  return std::nullopt;
}

std::optional<Architecture> parse_architecture(std::string_view text) {
  const auto s = lower(text);
  if (s == "centralized" || s == "central" || s == "cen") return Architecture::Centralized;
  if (s == "pd") return Architecture::PD;
  if (s == "fd") return Architecture::FD;
  return std::nullopt;
}

Constellation::Constellation(Name name, std::size_t side) : name_(name), side_(side) {
  const double max_level = static_cast<double>(side) - 1.0;
  // Average energy of the unnormalized square grid: 2 (M - 1) / 3.
  const double m = static_cast<double>(side * side);
  const double scale = 1.0 / std::sqrt(2.0 * (m - 1.0) / 3.0);
  symbols_.reserve(side * side);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t q = 0; q < side; ++q) {
      const double re = -max_level + 2.0 * static_cast<double>(i);
      const double im = -max_level + 2.0 * static_cast<double>(q);
      symbols_.emplace_back(scale * re, scale * im);
    }
  }
  double energy = 0.0;
  for (const auto& a : symbols_) energy += std::norm(a);
  es_ = energy / static_cast<double>(symbols_.size());
}

Constellation Constellation::qpsk() { return Constellation(Name::QPSK, 2); }
Constellation Constellation::qam16() { return Constellation(Name::QAM16, 4); }
Constellation Constellation::qam64() { return Constellation(Name::QAM64, 8); }

Constellation Constellation::make(Name name) {
  switch (name) {
    case Name::QPSK: return qpsk();
    case Name::QAM16: return qam16();
    case Name::QAM64: return qam64();
  }
  throw InvalidArgument("unknown constellation");
}

std::optional<Constellation> Constellation::parse(std::string_view text) {
  const auto s = lower(text);
  if (s == "qpsk" || s == "4qam" || s == "qam4") return qpsk();
  if (s == "16qam" || s == "qam16" || s == "16-qam") return qam16();
  if (s == "64qam" || s == "qam64" || s == "64-qam") return qam64();
  return std::nullopt;
}

std::string_view Constellation::label() const noexcept {
  switch (name_) {
    case Name::QPSK: return "QPSK";
    case Name::QAM16: return "16-QAM";
    case Name::QAM64: return "64-QAM";
  }
  return "?";
}

double Constellation::bits() const noexcept {
  return std::log2(static_cast<double>(symbols_.size()));
}

}  // namespace dbp
