#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "siphsim/platform.hpp"

namespace siphsim {

enum class LayerKind : std::uint8_t { Conv, FC, Pool, DepthwiseConv };
enum class Padding : std::uint8_t { Valid, Same };

const char* to_string(LayerKind kind);

/// One CNN layer. FC layers flatten H*W*C inputs into Cout outputs; Pool and
/// DepthwiseConv keep the channel count (Cout must equal C).
struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  int h = 1, w = 1, c = 1;
  int kh = 1, kw = 1;
  int cout = 1;
  int stride = 1;
  Padding padding = Padding::Valid;
  int bit_width = 8;

  /// Throws DimensionMismatch.
  void validate() const;
  int out_h() const;
  int out_w() const;
};

/// Element/byte counts and dot-product shape of one layer (or a slice of one).
struct LayerTraffic {
  std::uint64_t weight_bytes = 0;
  std::uint64_t input_bytes = 0;
  std::uint64_t output_bytes = 0;
  std::uint64_t mac_count = 0;
  /// Length of one output's dot product; 0 for layers without MACs.
  std::uint64_t dot_length = 0;
  /// Number of independent dot products (outputs) the layer computes.
  std::uint64_t dot_products = 0;

  std::uint64_t total_bytes() const { return weight_bytes + input_bytes + output_bytes; }
};

LayerTraffic layer_traffic(const LayerSpec& layer);

enum class TransferClass : std::uint8_t { WeightRead, ActivationRead, OutputWrite };
const char* to_string(TransferClass cls);

struct TransferRequest {
  std::size_t index = 0;  // issue order
  ChipletId src = 0;
  ChipletId dst = 0;
  std::uint64_t bytes = 1;
  TransferClass cls = TransferClass::WeightRead;
  std::size_t work = 0;  // index into TrafficTrace::work
};

/// Compute attached to one mapped layer (or slice). `group` is the barrier
/// group: reads of group g+1 wait for every write of group g.
struct MacWork {
  std::size_t layer = 0;
  std::size_t group = 0;
  ChipletId chiplet = 0;
  ChipletId memory = 0;
  std::uint64_t mac_count = 0;
  std::uint64_t dot_length = 0;
  std::uint64_t dot_products = 0;
};

struct TrafficTrace {
  std::vector<TransferRequest> transfers;
  std::vector<MacWork> work;

  std::uint64_t total_bytes() const;
  bool empty() const { return transfers.empty() && work.empty(); }
  bool operator==(const TrafficTrace& other) const;
};

/// Piece of a layer's work assigned to one compute chiplet.
struct WorkSlice {
  std::size_t layer = 0;
  ChipletId chiplet = 0;
  LayerTraffic traffic;
};

/// Ordered execution plan: slices of the same layer run concurrently.
struct ExecutionPlan {
  std::vector<WorkSlice> slices;
};

inline constexpr std::uint64_t kDefaultPacketBytes = 4096;

/// Emits reads, compute and writes per slice, splitting transfers into
/// packet-sized chunks. Memory chiplets are assigned round-robin by layer.
TrafficTrace build_trace(const ExecutionPlan& plan, const ChipletPlatform& platform,
                         std::uint64_t packet_bytes = kDefaultPacketBytes);

std::vector<LayerSpec> parse_model(std::istream& in, const std::string& source = "<model>");
std::vector<LayerSpec> load_model_file(const std::string& path);

const std::vector<std::string>& builtin_model_names();
/// Throws UnknownModel.
std::vector<LayerSpec> builtin_model(std::string_view name);
/// Raw text of an embedded model file. Throws UnknownModel.
std::string_view builtin_model_text(std::string_view name);

}  // namespace siphsim
