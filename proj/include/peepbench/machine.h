// Copyright 2026 The peepbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deterministic interpreter for straight-line AArch64 integer code.

#ifndef PEEPBENCH_MACHINE_H_
#define PEEPBENCH_MACHINE_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "peepbench/asm.h"

namespace peepbench {

struct Flags {
  bool n = false;
  bool z = false;
  bool c = false;
  bool v = false;
  friend bool operator==(const Flags&, const Flags&) = default;
};

struct MachineState {
  static constexpr uint64_t kInitialSp = 0x7FFFFFFFF000ull;

  std::array<uint64_t, 31> x{};
  uint64_t sp = kInitialSp;
  Flags nzcv;
  std::map<uint64_t, uint8_t> mem;  // bytes written so far
  uint64_t seed = 0;               // drives the fill of unwritten bytes

  // Byte at addr: the written value, else a hash of (seed, addr).
  uint8_t load_byte(uint64_t addr) const;
  uint64_t load(uint64_t addr, int bytes) const;  // little endian
  void store(uint64_t addr, int bytes, uint64_t value);

  // Register views. Zero registers read 0 and drop writes; a 32-bit write
  // clears bits 63..32.
  uint64_t read(const Register& r) const;
  void write(const Register& r, uint64_t value);

  friend bool operator==(const MachineState&, const MachineState&) = default;
};

MachineState init_state(uint64_t seed);

struct StoreRecord {
  uint64_t address = 0;
  int width = 0;  // bytes
  uint64_t value = 0;
  friend auto operator<=>(const StoreRecord&, const StoreRecord&) = default;
};

enum class Outcome : uint8_t {
  kReturned,
  kBranchTaken,
  kBranchNotTaken,
  kCalledExternal,
  kFellThrough,
};

std::string_view outcome_name(Outcome o);

struct TerminatorOutcome {
  Outcome kind = Outcome::kFellThrough;
  std::string target;
  friend bool operator==(const TerminatorOutcome&, const TerminatorOutcome&) = default;
};

enum class TrapKind : uint8_t { kUnsupportedInstruction, kMisaligned, kUnresolvedSymbol };

struct Trap {
  TrapKind kind = TrapKind::kUnsupportedInstruction;
  std::string detail;  // mnemonic, address or symbol
  int line = 0;
};

struct ExecutionResult {
  MachineState final;
  std::vector<StoreRecord> stores;  // program order
  TerminatorOutcome terminator;
  std::optional<Trap> trap;
  int executed = 0;
};

// Maps symbol names to page-aligned addresses for adrp/:lo12: pairs.
class SymbolTable {
 public:
  // Every well-formed name resolves to a fixed hash-derived 4 KiB-aligned
  // address.
  static SymbolTable synthetic();
  // Only the listed names resolve.
  static SymbolTable closed(std::map<std::string, uint64_t> entries);

  std::optional<uint64_t> resolve(const std::string& name) const;

 private:
  bool open_ = true;
  std::map<std::string, uint64_t> entries_;
};

ExecutionResult run_block(MachineState state, const BasicBlock& block,
                          const SymbolTable& symbols = SymbolTable::synthetic());

// Two's-complement add with carry-in, returning the result and NZCV for the
// given datapath width (32 or 64).
struct AddResult {
  uint64_t value;
  Flags flags;
};
AddResult add_with_carry(uint64_t a, uint64_t b, bool carry_in, int width);

// True when the condition holds under `flags`.
bool condition_holds(CondCode cond, const Flags& flags);

}  // namespace peepbench

#endif  // PEEPBENCH_MACHINE_H_
