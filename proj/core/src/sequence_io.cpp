#include "sfqgate/sequence_io.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "sfqgate/error.hpp"

namespace sfq {

namespace {

constexpr char kRawMagic[4] = {'S', 'F', 'Q', '1'};
constexpr char kZipMagic[4] = {'S', 'F', 'Q', 'Z'};

class ByteWriter {
 public:
  explicit ByteWriter(Bytes& out) : out_(out) {}
  template <class T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }

 private:
  Bytes& out_;
};

class ByteReader {
 public:
  explicit ByteReader(const Bytes& in) : in_(in) {}
  template <class T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(in_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }
  const std::uint8_t* take(std::size_t n) {
    need(n);
    const std::uint8_t* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    require(pos_ + n <= in_.size(), ErrorClass::Format, "sequence truncated");
  }
  const Bytes& in_;
  std::size_t pos_ = 0;
};

class BitWriter {
 public:
  void put(bool bit) {
    if (count_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(1u << (count_ % 8));
    ++count_;
  }
  void put_gamma(std::uint64_t v) {
    int width = 0;
    while ((v >> width) > 1) ++width;
    for (int i = 0; i < width; ++i) put(false);
    for (int i = width; i >= 0; --i) put((v >> i) & 1u);
  }
  const Bytes& bytes() const { return bytes_; }
  std::uint64_t count() const { return count_; }

 private:
  Bytes bytes_;
  std::uint64_t count_ = 0;
};

class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::uint64_t bits) : data_(data), bits_(bits) {}
  bool get() {
    require(pos_ < bits_, ErrorClass::Format, "compressed stream truncated");
    const bool b = (data_[pos_ / 8] >> (pos_ % 8)) & 1u;
    ++pos_;
    return b;
  }
  std::uint64_t get_gamma() {
    int width = 0;
    while (!get()) {
      ++width;
      require(width < 64, ErrorClass::Format, "bad run-length code");
    }
    std::uint64_t v = 1;
    for (int i = 0; i < width; ++i) v = (v << 1) | (get() ? 1u : 0u);
    return v;
  }
  std::uint64_t position() const { return pos_; }

 private:
  const std::uint8_t* data_;
  std::uint64_t bits_;
  std::uint64_t pos_ = 0;
};

template <class T>
T fixed(double value, double scale, const char* what) {
  const double v = std::round(value * scale);
  require(v >= 0.0 && v <= static_cast<double>(std::numeric_limits<T>::max()), ErrorClass::Format,
          std::string(what) + " out of range for the sequence header");
  return static_cast<T>(v);
}

struct Header {
  std::uint64_t clock_mhz = 0;
  std::uint64_t duration_ps = 0;
  std::uint32_t kick_urad = 0;
  std::uint32_t flux_off_u = 0;
  std::uint32_t flux_on_u = 0;
  std::uint16_t n_ramp = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> corners;
};

Header make_header(const ControlSchedule& s) {
  s.validate();
  require(s.mode == ScheduleMode::Discrete, ErrorClass::Format,
          "only discrete schedules can be serialized");
  Header h;
  h.clock_mhz = fixed<std::uint64_t>(s.clock_freq, 1e3, "clock_freq");
  h.duration_ps = fixed<std::uint64_t>(s.duration, 1e3, "duration");
  h.kick_urad = fixed<std::uint32_t>(s.kick_angle, 1e6, "kick_angle");
  h.flux_off_u = fixed<std::uint32_t>(s.flux_off, 1e6, "flux_off");
  h.flux_on_u = fixed<std::uint32_t>(s.flux_on, 1e6, "flux_on");
  require(s.n_ramp <= std::numeric_limits<std::uint16_t>::max(), ErrorClass::Format,
          "n_ramp out of range");
  h.n_ramp = static_cast<std::uint16_t>(s.n_ramp);
  require(s.excursions.size() <= std::numeric_limits<std::uint16_t>::max(), ErrorClass::Format,
          "too many excursions");
  const double period = s.clock_period();
  for (const auto& e : s.excursions) {
    h.corners.emplace_back(static_cast<std::uint32_t>(nearest_tick(e.start, period)),
                           static_cast<std::uint32_t>(nearest_tick(e.end, period)));
  }
  return h;
}

void write_header(ByteWriter& w, const Header& h, const char* magic) {
  w.raw(magic, 4);
  w.put<std::uint16_t>(kSequenceVersion);
  w.put(h.clock_mhz);
  w.put(h.duration_ps);
  w.put(h.kick_urad);
  w.put(h.flux_off_u);
  w.put(h.flux_on_u);
  w.put(h.n_ramp);
  w.put(static_cast<std::uint16_t>(h.corners.size()));
  for (const auto& [a, b] : h.corners) {
    w.put(a);
    w.put(b);
  }
}

ControlSchedule read_header(ByteReader& r, const char* magic) {
  const std::uint8_t* m = r.take(4);
  require(std::memcmp(m, magic, 4) == 0, ErrorClass::Format, "bad magic");
  const auto version = r.get<std::uint16_t>();
  require(version == kSequenceVersion, ErrorClass::Format,
          "unsupported sequence version " + std::to_string(version));
  ControlSchedule s;
  s.mode = ScheduleMode::Discrete;
  s.clock_freq = static_cast<double>(r.get<std::uint64_t>()) / 1e3;
  s.duration = static_cast<double>(r.get<std::uint64_t>()) / 1e3;
  s.kick_angle = static_cast<double>(r.get<std::uint32_t>()) / 1e6;
  s.flux_off = static_cast<double>(r.get<std::uint32_t>()) / 1e6;
  s.flux_on = static_cast<double>(r.get<std::uint32_t>()) / 1e6;
  s.n_ramp = r.get<std::uint16_t>();
  require(s.clock_freq > 0.0, ErrorClass::Format, "clock frequency is zero");
  const auto count = r.get<std::uint16_t>();
  const double period = s.clock_period();
  for (std::uint16_t i = 0; i < count; ++i) {
    const auto a = r.get<std::uint32_t>();
    const auto b = r.get<std::uint32_t>();
    s.excursions.push_back({a * period, b * period});
  }
  s.amplitudes_q1.assign(s.ticks(), 0.0);
  s.amplitudes_q2.assign(s.ticks(), 0.0);
  return s;
}

void check_schedule(const ControlSchedule& s) {
  try {
    s.validate();
  } catch (const Error& e) {
    fail(ErrorClass::Format, std::string("decoded schedule invalid: ") + e.what());
  }
}

}  // namespace

Bytes write_sequence(const ControlSchedule& s) {
  const Header h = make_header(s);
  Bytes out;
  ByteWriter w(out);
  write_header(w, h, kRawMagic);
  const std::size_t n = s.ticks();
  for (int q : {1, 2}) {
    Bytes bits((n + 7) / 8, 0);
    const auto& a = s.amplitudes(q);
    for (std::size_t j = 0; j < n; ++j)
      if (a[j] != 0.0) bits[j / 8] |= static_cast<std::uint8_t>(1u << (j % 8));
    out.insert(out.end(), bits.begin(), bits.end());
  }
  return out;
}

ControlSchedule read_sequence(const Bytes& bytes) {
  ByteReader r(bytes);
  ControlSchedule s = read_header(r, kRawMagic);
  const std::size_t n = s.ticks();
  const std::size_t per_qubit = (n + 7) / 8;
  require(r.remaining() == 2 * per_qubit, ErrorClass::Format,
          "payload length " + std::to_string(r.remaining()) + " does not match " +
              std::to_string(2 * per_qubit) + " bytes");
  for (int q : {1, 2}) {
    const std::uint8_t* bits = r.take(per_qubit);
    auto& a = s.amplitudes(q);
    for (std::size_t j = 0; j < n; ++j) a[j] = (bits[j / 8] >> (j % 8)) & 1u ? 1.0 : 0.0;
    for (std::size_t j = n; j < 8 * per_qubit; ++j)
      require(((bits[j / 8] >> (j % 8)) & 1u) == 0, ErrorClass::Format, "nonzero pad bits");
  }
  check_schedule(s);
  return s;
}

ControlSchedule canonical_schedule(const ControlSchedule& s) { return read_sequence(write_sequence(s)); }

int slots_per_period(double clock_freq, double qubit_freq) {
  require(qubit_freq > 0.0, ErrorClass::UnsupportedRatio, "qubit frequency must be > 0");
  const double m = clock_freq / qubit_freq;
  const double r = std::round(m);
  if (r < 1.0 || std::abs(m - r) > 1e-6 * r)
    fail(ErrorClass::UnsupportedRatio, "clock/qubit frequency ratio " + std::to_string(m) +
                                           " is not an integer");
  return static_cast<int>(r);
}

Bytes compress_sequence(const ControlSchedule& s, double qubit_freq) {
  const Header h = make_header(s);
  const int m = slots_per_period(s.clock_freq, qubit_freq);
  require(m <= std::numeric_limits<std::uint16_t>::max(), ErrorClass::UnsupportedRatio,
          "too many slots per period");
  Bytes out;
  ByteWriter w(out);
  write_header(w, h, kZipMagic);
  w.put(static_cast<std::uint16_t>(m));
  const std::size_t n = s.ticks();
  for (int q : {1, 2}) {
    const auto& a = s.amplitudes(q);
    BitWriter bits;
    for (int slot = 0; slot < m; ++slot) {
      if (static_cast<std::size_t>(slot) >= n) break;
      bool current = a[slot] != 0.0;
      bits.put(current);
      std::uint64_t run = 0;
      for (std::size_t j = slot; j < n; j += m) {
        const bool b = a[j] != 0.0;
        if (b == current) {
          ++run;
        } else {
          bits.put_gamma(run);
          current = b;
          run = 1;
        }
      }
      bits.put_gamma(run);
    }
    require(bits.count() <= std::numeric_limits<std::uint32_t>::max(), ErrorClass::Format,
            "compressed stream too long");
    w.put(static_cast<std::uint32_t>(bits.count()));
    out.insert(out.end(), bits.bytes().begin(), bits.bytes().end());
  }
  return out;
}

namespace {

struct ZipLayout {
  ControlSchedule schedule;
  int slots = 0;
  std::array<std::uint32_t, 2> bits{};
  std::array<const std::uint8_t*, 2> data{};
};

ZipLayout parse_zip(const Bytes& bytes) {
  ByteReader r(bytes);
  ZipLayout z;
  z.schedule = read_header(r, kZipMagic);
  z.slots = r.get<std::uint16_t>();
  require(z.slots >= 1, ErrorClass::Format, "slots per period must be >= 1");
  for (int q = 0; q < 2; ++q) {
    z.bits[q] = r.get<std::uint32_t>();
    z.data[q] = r.take((static_cast<std::size_t>(z.bits[q]) + 7) / 8);
  }
  require(r.remaining() == 0, ErrorClass::Format, "trailing bytes after compressed payload");
  return z;
}

}  // namespace

ControlSchedule decompress_sequence(const Bytes& bytes) {
  ZipLayout z = parse_zip(bytes);
  ControlSchedule& s = z.schedule;
  const std::size_t n = s.ticks();
  const std::size_t m = static_cast<std::size_t>(z.slots);
  for (int q : {1, 2}) {
    BitReader bits(z.data[q - 1], z.bits[q - 1]);
    auto& a = s.amplitudes(q);
    for (std::size_t slot = 0; slot < m && slot < n; ++slot) {
      const std::size_t length = (n - slot + m - 1) / m;
      bool current = bits.get();
      std::size_t filled = 0;
      while (filled < length) {
        const std::uint64_t run = bits.get_gamma();
        require(run >= 1 && filled + run <= length, ErrorClass::Format, "run exceeds stream length");
        for (std::uint64_t k = 0; k < run; ++k) a[slot + (filled + k) * m] = current ? 1.0 : 0.0;
        filled += run;
        current = !current;
      }
    }
    require(bits.position() == z.bits[q - 1], ErrorClass::Format,
            "compressed stream length mismatch");
  }
  check_schedule(s);
  return s;
}

std::array<std::uint32_t, 2> compressed_payload_bits(const Bytes& bytes) { return parse_zip(bytes).bits; }

bool is_compressed(const Bytes& bytes) {
  return bytes.size() >= 4 && std::memcmp(bytes.data(), kZipMagic, 4) == 0;
}

ControlSchedule read_any_sequence(const Bytes& bytes) {
  return is_compressed(bytes) ? decompress_sequence(bytes) : read_sequence(bytes);
}

}  // namespace sfq
