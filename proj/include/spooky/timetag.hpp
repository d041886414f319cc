#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spooky::tag {

enum class Station : std::uint8_t { A = 0, B = 1 };

struct TimeTagRecord {
  std::int64_t timestamp_ps = 0;  // local clock
  std::uint8_t channel = 0;       // PBS transmit/reflect
  std::uint8_t setting = 0;       // active basis index
};

struct SyncPulseRecord {
  std::int64_t timestamp_ps = 0;
  std::uint32_t pulse_index = 0;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  std::size_t byte_offset;
};

// Binary formats, little-endian.
// Tag file:  16-byte header {magic "QTT1", version u16, station u8, 9 reserved},
//            then 10-byte records {timestamp_ps u64, channel u8, setting u8}.
// Sync file: same header with magic "QSP1",
//            then 12-byte records {timestamp_ps u64, pulse_index u32}.
void write_tags(const std::string& path, Station station,
                const std::vector<TimeTagRecord>& records);
std::vector<TimeTagRecord> read_tags(const std::string& path,
                                     Station* station_out = nullptr);

void write_sync(const std::string& path, Station station,
                const std::vector<SyncPulseRecord>& records);
std::vector<SyncPulseRecord> read_sync(const std::string& path,
                                       Station* station_out = nullptr);

// CSV interoperability input: header line then timestamp_ps,channel,setting.
std::vector<TimeTagRecord> read_tags_csv(const std::string& path);
void write_tags_csv(const std::string& path,
                    const std::vector<TimeTagRecord>& records);

// Reads .csv by extension, binary otherwise.
std::vector<TimeTagRecord> read_tags_any(const std::string& path);

}  // namespace spooky::tag
