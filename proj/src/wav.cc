// Copyright 2026 The speechqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "speechqc/wav.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>

#include "speechqc/error.h"
#include "speechqc/io_util.h"
#include "speechqc/resampler.h"

namespace speechqc {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

// Tail shared by the PCM and IEEE float KSDATAFORMAT_SUBTYPE GUIDs.
constexpr std::array<std::uint8_t, 14> kSubformatGuidTail = {
    0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
    0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};

// WAVE_FORMAT_EXTENSIBLE speaker bits we can map to roles.
constexpr std::uint32_t kSpeakerFrontLeft = 0x1;
constexpr std::uint32_t kSpeakerFrontRight = 0x2;
constexpr std::uint32_t kSpeakerFrontCenter = 0x4;
constexpr std::uint32_t kSpeakerLfe = 0x8;
constexpr std::uint32_t kSpeakerBackLeft = 0x10;
constexpr std::uint32_t kSpeakerBackRight = 0x20;
constexpr std::uint32_t kSpeakerSideLeft = 0x200;
constexpr std::uint32_t kSpeakerSideRight = 0x400;

class ByteReader {
 public:
  // `base` is the file offset of bytes[0], used in error positions.
  explicit ByteReader(std::span<const std::byte> bytes, std::size_t base = 0)
      : bytes_(bytes), base_(base) {}

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return bytes_.size() - offset_; }

  void Require(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw ParseError(std::string("truncated file while reading ") + what,
                       base_ + offset_);
    }
  }

  std::uint16_t U16(const char* what) {
    Require(2, what);
    std::uint16_t v = static_cast<std::uint16_t>(
        std::to_integer<unsigned>(bytes_[offset_]) |
        (std::to_integer<unsigned>(bytes_[offset_ + 1]) << 8));
    offset_ += 2;
    return v;
  }

  std::uint32_t U32(const char* what) {
    Require(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | std::to_integer<std::uint32_t>(bytes_[offset_ + i]);
    }
    offset_ += 4;
    return v;
  }

  std::string Tag(const char* what) {
    Require(4, what);
    std::string tag(4, '\0');
    for (int i = 0; i < 4; ++i) {
      tag[i] = static_cast<char>(bytes_[offset_ + i]);
    }
    offset_ += 4;
    return tag;
  }

  std::uint8_t Byte(const char* what) {
    Require(1, what);
    return std::to_integer<std::uint8_t>(bytes_[offset_++]);
  }

  void Skip(std::size_t n, const char* what) {
    Require(n, what);
    offset_ += n;
  }

  void Seek(std::size_t offset) { offset_ = offset; }

 private:
  std::span<const std::byte> bytes_;
  std::size_t base_ = 0;
  std::size_t offset_ = 0;
};

[[noreturn]] void Unsupported(const std::string& field,
                              const std::string& detail) {
  throw Error(ErrorCode::kUnsupportedFormat,
              "unsupported format: " + field + " " + detail);
}

std::vector<ChannelRole> LayoutFromMask(std::uint32_t mask,
                                        int num_channels) {
  std::vector<ChannelRole> layout;
  const std::pair<std::uint32_t, ChannelRole> kBits[] = {
      {kSpeakerFrontLeft, ChannelRole::kLeft},
      {kSpeakerFrontRight, ChannelRole::kRight},
      {kSpeakerFrontCenter, ChannelRole::kCenter},
      {kSpeakerLfe, ChannelRole::kLfe},
      {kSpeakerBackLeft, ChannelRole::kLeftSurround},
      {kSpeakerBackRight, ChannelRole::kRightSurround},
      {kSpeakerSideLeft, ChannelRole::kLeftSurround},
      {kSpeakerSideRight, ChannelRole::kRightSurround},
  };
  std::uint32_t known = 0;
  for (const auto& [bit, role] : kBits) {
    known |= bit;
    if ((mask & bit) != 0) layout.push_back(role);
  }
  if ((mask & ~known) != 0) {
    Unsupported("dwChannelMask", "contains speaker positions outside 5.1");
  }
  if (static_cast<int>(layout.size()) != num_channels) {
    Unsupported("dwChannelMask",
                "does not describe " + std::to_string(num_channels) +
                    " channels");
  }
  if (num_channels == 1 && layout.front() == ChannelRole::kCenter) {
    layout.front() = ChannelRole::kMono;
  }
  return layout;
}

int BytesPerSample(SampleFormat format) {
  switch (format) {
    case SampleFormat::kPcm16:
      return 2;
    case SampleFormat::kPcm24:
      return 3;
    case SampleFormat::kPcm32:
    case SampleFormat::kFloat32:
      return 4;
    case SampleFormat::kFloat64:
      return 8;
  }
  return 0;
}

bool IsFloat(SampleFormat format) {
  return format == SampleFormat::kFloat32 || format == SampleFormat::kFloat64;
}

float DecodeSample(const std::byte* p, SampleFormat format) {
  auto u = [p](int i) { return std::to_integer<std::uint32_t>(p[i]); };
  switch (format) {
    case SampleFormat::kPcm16: {
      auto v = static_cast<std::int16_t>(u(0) | (u(1) << 8));
      return static_cast<float>(v / 32768.0);
    }
    case SampleFormat::kPcm24: {
      std::uint32_t raw = u(0) | (u(1) << 8) | (u(2) << 16);
      auto v = static_cast<std::int32_t>(raw << 8) >> 8;
      return static_cast<float>(v / 8388608.0);
    }
    case SampleFormat::kPcm32: {
      auto v = static_cast<std::int32_t>(u(0) | (u(1) << 8) | (u(2) << 16) |
                                         (u(3) << 24));
      return static_cast<float>(v / 2147483648.0);
    }
    case SampleFormat::kFloat32: {
      std::uint32_t raw = u(0) | (u(1) << 8) | (u(2) << 16) | (u(3) << 24);
      return std::bit_cast<float>(raw);
    }
    case SampleFormat::kFloat64: {
      std::uint64_t raw = 0;
      for (int i = 7; i >= 0; --i) raw = (raw << 8) | u(i);
      return static_cast<float>(std::bit_cast<double>(raw));
    }
  }
  return 0.0f;
}

SampleFormat ResolveFormat(std::uint16_t tag, int bits) {
  if (tag == kFormatPcm) {
    switch (bits) {
      case 16:
        return SampleFormat::kPcm16;
      case 24:
        return SampleFormat::kPcm24;
      case 32:
        return SampleFormat::kPcm32;
      default:
        Unsupported("wBitsPerSample",
                    std::to_string(bits) + " for integer PCM (need 16/24/32)");
    }
  }
  if (tag == kFormatFloat) {
    switch (bits) {
      case 32:
        return SampleFormat::kFloat32;
      case 64:
        return SampleFormat::kFloat64;
      default:
        Unsupported("wBitsPerSample",
                    std::to_string(bits) + " for IEEE float (need 32/64)");
    }
  }
  Unsupported("wFormatTag", "0x" + [tag] {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%04X", tag);
    return std::string(buf);
  }() + " (only PCM and IEEE float are supported)");
}

void PutU16(std::vector<std::byte>& out, std::uint16_t v) {
  out.push_back(static_cast<std::byte>(v & 0xFF));
  out.push_back(static_cast<std::byte>(v >> 8));
}

void PutU32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
  }
}

void PutTag(std::vector<std::byte>& out, const char* tag) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>(tag[i]));
}

std::int64_t Quantize(float x, int bits) {
  const double scale = std::ldexp(1.0, bits - 1);
  const double max = scale - 1.0;
  const double v = std::nearbyint(static_cast<double>(x) * scale);
  return static_cast<std::int64_t>(std::clamp(v, -scale, max));
}

std::uint32_t MaskForLayout(const std::vector<ChannelRole>& layout) {
  std::uint32_t mask = 0;
  for (ChannelRole role : layout) {
    switch (role) {
      case ChannelRole::kMono:
      case ChannelRole::kCenter:
        mask |= kSpeakerFrontCenter;
        break;
      case ChannelRole::kLeft:
        mask |= kSpeakerFrontLeft;
        break;
      case ChannelRole::kRight:
        mask |= kSpeakerFrontRight;
        break;
      case ChannelRole::kLfe:
        mask |= kSpeakerLfe;
        break;
      case ChannelRole::kLeftSurround:
        mask |= kSpeakerBackLeft;
        break;
      case ChannelRole::kRightSurround:
        mask |= kSpeakerBackRight;
        break;
    }
  }
  return mask;
}

// Parses a 'fmt ' chunk body into `wav`; returns nBlockAlign.
std::size_t ParseFmt(ByteReader& reader, std::uint32_t size,
                     std::size_t chunk_start, WavInfo& wav) {
  if (size < 16) throw ParseError("'fmt ' chunk too small", chunk_start);
  reader.Require(size, "'fmt ' chunk");
  std::uint16_t tag = reader.U16("wFormatTag");
  const int channels = reader.U16("nChannels");
  const std::uint32_t rate = reader.U32("nSamplesPerSec");
  reader.U32("nAvgBytesPerSec");
  const std::size_t block_align = reader.U16("nBlockAlign");
  const int bits = reader.U16("wBitsPerSample");
  if (tag == kFormatExtensible) {
    if (size < 40) {
      throw ParseError("WAVE_FORMAT_EXTENSIBLE 'fmt ' chunk too small",
                       chunk_start);
    }
    reader.U16("cbSize");
    const int valid_bits = reader.U16("wValidBitsPerSample");
    wav.channel_mask = reader.U32("dwChannelMask");
    const std::uint16_t sub_tag = reader.U16("SubFormat");
    std::array<std::uint8_t, 14> tail{};
    for (auto& b : tail) b = reader.Byte("SubFormat");
    if (tail != kSubformatGuidTail) {
      Unsupported("SubFormat", "GUID is not PCM or IEEE float");
    }
    if (valid_bits != 0 && valid_bits != bits) {
      Unsupported("wValidBitsPerSample",
                  std::to_string(valid_bits) + " differs from container " +
                      std::to_string(bits));
    }
    tag = sub_tag;
  }
  if (channels < 1 || channels > 6) {
    Unsupported("nChannels",
                std::to_string(channels) + " (need 1 to 6 channels)");
  }
  if (rate == 0) Unsupported("nSamplesPerSec", "is zero");
  wav.format = ResolveFormat(tag, bits);
  wav.num_channels = channels;
  wav.sample_rate = static_cast<int>(rate);
  if (block_align !=
      static_cast<std::size_t>(channels * BytesPerSample(wav.format))) {
    Unsupported("nBlockAlign", std::to_string(block_align) +
                                   " is inconsistent with channels and "
                                   "sample size");
  }
  return block_align;
}

std::vector<ChannelRole> LayoutOf(const WavInfo& wav) {
  return wav.channel_mask != 0
             ? LayoutFromMask(wav.channel_mask, wav.num_channels)
             : DefaultLayout(static_cast<std::size_t>(wav.num_channels));
}

}  // namespace

AudioBuffer DecodeWav(std::span<const std::byte> bytes, WavInfo* info) {
  ByteReader reader(bytes);
  if (reader.Tag("RIFF header") != "RIFF") {
    Unsupported("RIFF chunk id", "is not 'RIFF'");
  }
  reader.U32("RIFF size");
  if (reader.Tag("WAVE id") != "WAVE") {
    Unsupported("RIFF form type", "is not 'WAVE'");
  }

  bool have_fmt = false;
  WavInfo wav;
  std::size_t block_align = 0;
  while (true) {
    if (reader.remaining() == 0) {
      throw ParseError("no 'data' chunk found", reader.offset());
    }
    const std::size_t chunk_start = reader.offset();
    const std::string id = reader.Tag("chunk id");
    const std::uint32_t size = reader.U32("chunk size");
    const std::size_t body = reader.offset();

    if (id == "fmt ") {
      block_align = ParseFmt(reader, size, chunk_start, wav);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) {
        throw ParseError("'data' chunk before 'fmt ' chunk", chunk_start);
      }
      if (reader.remaining() < size) {
        throw ParseError("truncated file: 'data' chunk declares " +
                             std::to_string(size) + " bytes but only " +
                             std::to_string(reader.remaining()) + " remain",
                         bytes.size());
      }
      if (size % block_align != 0) {
        throw ParseError("'data' chunk size is not a whole number of frames",
                         chunk_start + 4);
      }
      const std::size_t frames = size / block_align;
      wav.num_frames = frames;
      const int stride = BytesPerSample(wav.format);
      std::vector<std::vector<float>> channels(
          wav.num_channels, std::vector<float>(frames));
      const std::byte* p = bytes.data() + body;
      for (std::size_t i = 0; i < frames; ++i) {
        for (int c = 0; c < wav.num_channels; ++c) {
          channels[c][i] = DecodeSample(p, wav.format);
          p += stride;
        }
      }
      if (info != nullptr) *info = wav;
      return AudioBuffer(wav.sample_rate, LayoutOf(wav),
                         std::move(channels));
    }

    // Chunks are word aligned; tolerate a missing pad byte at end of file.
    reader.Seek(body);
    const std::string what = "'" + id + "' chunk";
    reader.Skip(size, what.c_str());
    if ((size & 1u) != 0 && reader.remaining() > 0) reader.Skip(1, "pad");
  }
}

WavReader::WavReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::error_code ec;
  const std::uint64_t file_size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot stat " + path.string());
  const auto fail = [&](const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte_offset());
  };
  auto read_at = [&](std::uint64_t offset, std::size_t n) {
    std::vector<std::byte> buf(n);
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(n));
    buf.resize(static_cast<std::size_t>(std::max<std::streamsize>(in_.gcount(), 0)));
    in_.clear();
    return buf;
  };
  try {
    const auto head = read_at(0, 12);
    ByteReader reader(head);
    if (reader.Tag("RIFF header") != "RIFF") {
      Unsupported("RIFF chunk id", "is not 'RIFF'");
    }
    reader.U32("RIFF size");
    if (reader.Tag("WAVE id") != "WAVE") {
      Unsupported("RIFF form type", "is not 'WAVE'");
    }
    bool have_fmt = false;
    std::uint64_t pos = 12;
    while (true) {
      if (pos >= file_size) throw ParseError("no 'data' chunk found", pos);
      const auto chunk = read_at(pos, 8);
      ByteReader ch(chunk, pos);
      const std::string id = ch.Tag("chunk id");
      const std::uint32_t size = ch.U32("chunk size");
      if (id == "fmt ") {
        const auto body = read_at(pos + 8, size);
        ByteReader fmt(body, pos + 8);
        block_align_ = ParseFmt(fmt, size, pos, info_);
        have_fmt = true;
      } else if (id == "data") {
        if (!have_fmt) {
          throw ParseError("'data' chunk before 'fmt ' chunk", pos);
        }
        const std::uint64_t remaining = file_size - (pos + 8);
        if (remaining < size) {
          throw ParseError("truncated file: 'data' chunk declares " +
                               std::to_string(size) + " bytes but only " +
                               std::to_string(remaining) + " remain",
                           file_size);
        }
        if (size % block_align_ != 0) {
          throw ParseError(
              "'data' chunk size is not a whole number of frames", pos + 4);
        }
        info_.num_frames = size / block_align_;
        layout_ = LayoutOf(info_);
        in_.seekg(static_cast<std::streamoff>(pos + 8));
        return;
      }
      pos += 8 + static_cast<std::uint64_t>(size) + (size & 1u);
    }
  } catch (const ParseError& e) {
    fail(e);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

AudioBuffer WavReader::Read(std::size_t max_frames) {
  const auto n = static_cast<std::size_t>(
      std::min<std::uint64_t>(max_frames, frames_remaining()));
  scratch_.resize(n * block_align_);
  in_.read(reinterpret_cast<char*>(scratch_.data()),
           static_cast<std::streamsize>(scratch_.size()));
  if (static_cast<std::size_t>(in_.gcount()) != scratch_.size()) {
    throw Error(ErrorCode::kIo, "short read from " + path_.string());
  }
  const int stride = BytesPerSample(info_.format);
  std::vector<std::vector<float>> channels(info_.num_channels,
                                           std::vector<float>(n));
  const std::byte* p = scratch_.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < info_.num_channels; ++c) {
      channels[c][i] = DecodeSample(p, info_.format);
      p += stride;
    }
  }
  read_ += n;
  return AudioBuffer(info_.sample_rate, layout_, std::move(channels));
}

AudioBuffer ReadWav(const std::filesystem::path& path, WavInfo* info) {
  const std::vector<std::byte> bytes = ReadFileBytes(path);
  try {
    return DecodeWav(bytes, info);
  } catch (const Error& e) {
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
      throw ParseError(path.string() + ": " + pe->what(), pe->byte_offset());
    }
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::byte> EncodeWav(const AudioBuffer& buffer,
                                 SampleFormat format) {
  const int bytes_per_sample = BytesPerSample(format);
  const int bits = bytes_per_sample * 8;
  const auto channels = static_cast<std::uint16_t>(buffer.num_channels());
  const std::uint32_t block_align = channels * bytes_per_sample;
  const std::uint64_t data_size64 =
      static_cast<std::uint64_t>(buffer.num_frames()) * block_align;
  if (data_size64 > 0xFFFFFFF0ull) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "unsupported format: audio too long for a RIFF container");
  }
  const auto data_size = static_cast<std::uint32_t>(data_size64);
  const bool extensible = channels > 2;
  const std::uint32_t fmt_size = extensible ? 40 : (IsFloat(format) ? 18 : 16);

  std::vector<std::byte> out;
  out.reserve(data_size + 80);
  PutTag(out, "RIFF");
  PutU32(out, 4 + (8 + fmt_size) + (8 + data_size) + (data_size & 1u));
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, fmt_size);
  const std::uint16_t tag = IsFloat(format) ? kFormatFloat : kFormatPcm;
  PutU16(out, extensible ? kFormatExtensible : tag);
  PutU16(out, channels);
  PutU32(out, static_cast<std::uint32_t>(buffer.sample_rate()));
  PutU32(out, static_cast<std::uint32_t>(buffer.sample_rate()) * block_align);
  PutU16(out, static_cast<std::uint16_t>(block_align));
  PutU16(out, static_cast<std::uint16_t>(bits));
  if (extensible) {
    PutU16(out, 22);
    PutU16(out, static_cast<std::uint16_t>(bits));
    PutU32(out, MaskForLayout(buffer.layout()));
    PutU16(out, tag);
    for (std::uint8_t b : kSubformatGuidTail) {
      out.push_back(static_cast<std::byte>(b));
    }
  } else if (fmt_size == 18) {
    PutU16(out, 0);
  }
  PutTag(out, "data");
  PutU32(out, data_size);

  for (std::size_t i = 0; i < buffer.num_frames(); ++i) {
    for (std::size_t c = 0; c < buffer.num_channels(); ++c) {
      const float x = buffer.channel(c)[i];
      switch (format) {
        case SampleFormat::kFloat32:
          PutU32(out, std::bit_cast<std::uint32_t>(x));
          break;
        case SampleFormat::kFloat64: {
          const auto raw = std::bit_cast<std::uint64_t>(static_cast<double>(x));
          PutU32(out, static_cast<std::uint32_t>(raw));
          PutU32(out, static_cast<std::uint32_t>(raw >> 32));
          break;
        }
        default: {
          const auto v = static_cast<std::uint64_t>(Quantize(x, bits));
          for (int b = 0; b < bytes_per_sample; ++b) {
            out.push_back(static_cast<std::byte>((v >> (8 * b)) & 0xFF));
          }
        }
      }
    }
  }
  if ((data_size & 1u) != 0) out.push_back(std::byte{0});
  return out;
}

void WriteWav(const std::filesystem::path& path, const AudioBuffer& buffer,
              SampleFormat format) {
  const std::vector<std::byte> bytes = EncodeWav(buffer, format);
  WriteFileAtomic(path, std::span<const std::byte>(bytes));
}

AudioBuffer LoadAudio(const std::filesystem::path& path, int target_rate,
                      Diagnostics* diag, bool* resampled) {
  AudioBuffer buffer = ReadWav(path);
  if (resampled != nullptr) *resampled = false;
  if (target_rate > 0 && buffer.sample_rate() != target_rate) {
    Warn(diag, path.string() + ": resampled from " +
                   std::to_string(buffer.sample_rate()) + " Hz to " +
                   std::to_string(target_rate) + " Hz");
    buffer = Resample(buffer, target_rate);
    if (resampled != nullptr) *resampled = true;
  }
  return buffer;
}

}  // namespace speechqc
