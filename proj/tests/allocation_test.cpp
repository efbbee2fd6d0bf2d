#include <atomic>
#include <cstdlib>
#include <new>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vibxfer/engine.hpp"

namespace {
std::atomic<std::size_t> allocations {0};
}

void* operator new (std::size_t n)
{
  ++allocations;
  if (void* p = std::malloc (n ? n : 1)) {
    return p;
  }
  throw std::bad_alloc {};
}
void* operator new[] (std::size_t n) { return operator new (n); }
void  operator delete (void* p) noexcept { std::free (p); }
void  operator delete[] (void* p) noexcept { std::free (p); }
void  operator delete (void* p, std::size_t) noexcept { std::free (p); }
void  operator delete[] (void* p, std::size_t) noexcept { std::free (p); }

using namespace vibxfer;
namespace orc = vibxfer::oracles;

namespace {

std::size_t count_process_allocations (std::size_t block, const std::vector<double>& in, const std::vector<double>& side)
{
  VibratoTransfer     vt {44100.0, 44100.0};
  std::vector<double> out (block);
  vt.set_params ({1.0, 1.0});
  // Warm-up so every lazily sized buffer has reached steady state.
  for (std::size_t pos = 0; pos + block <= 44100; pos += block) {
    vt.process ({in.data() + pos, block}, {side.data() + pos, block}, out);
  }
  const std::size_t before = allocations.load();
  for (std::size_t pos = 44100; pos + block <= in.size(); pos += block) {
    vt.process ({in.data() + pos, block}, {side.data() + pos, block}, out);
    if (pos == 88200 - (88200 % block)) {
      vt.set_params ({2.0, 0.5});
    }
  }
  return allocations.load() - before;
}

} // namespace

TEST (Allocation, SteadyStateProcessIsAllocationFree)
{
  const auto in   = orc::make_tone ({.fs = 44100.0, .seconds = 5.0, .fc = 220.0, .amplitude = 0.4});
  auto       side = orc::make_tone ({.fs = 44100.0, .seconds = 5.0, .fc = 440.0, .amplitude = 0.5, .fm_depth = 0.01, .am_depth = 0.05});
  // Silence gap so the gate releases and re-arms inside the measured span.
  std::fill (side.begin() + 120000, side.begin() + 140000, 0.0);
  for (std::size_t block : {16u, 64u, 1024u, 2048u}) {
    EXPECT_EQ (count_process_allocations (block, in, side), 0u) << "block " << block;
  }
}

TEST (Allocation, CounterSeesAllocations)
{
  const std::size_t before = allocations.load();
  auto*             v      = new std::vector<double> (100);
  delete v;
  EXPECT_GE (allocations.load() - before, 2u);
}

int main (int argc, char** argv)
{
  ::testing::InitGoogleTest (&argc, argv);
  return RUN_ALL_TESTS();
}
