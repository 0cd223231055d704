#pragma once

#include <algorithm>
#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace jordan {

enum class Status { Pass, Fail, ErratumSuspected, Info };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::ErratumSuspected: return "erratum-suspected";
    case Status::Info: return "info";
  }
  return "fail";
}

struct CheckRecord {
  std::string check_id;
  std::vector<std::string> catalog_ids;
  std::string suite;
  Status status = Status::Pass;
  std::string residual = "0";
  std::string detail;
  double timing_ms = 0;
};

struct CheckReport {
  std::vector<CheckRecord> records;

  void add(CheckRecord r) { records.push_back(std::move(r)); }
  void append(const CheckReport& o) { records.insert(records.end(), o.records.begin(), o.records.end()); }

  std::size_t count(Status s) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [s](const CheckRecord& r) { return r.status == s; }));
  }
  /// No failures; suspected errata count as failures unless allowed.
  bool passed(bool allow_errata = false) const {
    return count(Status::Fail) == 0 && (allow_errata || count(Status::ErratumSuspected) == 0);
  }
  const CheckRecord* find(std::string_view id) const {
    for (const auto& r : records)
      if (r.check_id == id) return &r;
    return nullptr;
  }
  std::vector<const CheckRecord*> failures() const {
    std::vector<const CheckRecord*> out;
    for (const auto& r : records)
      if (r.status == Status::Fail || r.status == Status::ErratumSuspected) out.push_back(&r);
    return out;
  }
  void sort() {
    std::stable_sort(records.begin(), records.end(), [](const CheckRecord& a, const CheckRecord& b) {
      if (a.suite != b.suite) return a.suite < b.suite;
      return a.check_id < b.check_id;
    });
  }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace jordan
