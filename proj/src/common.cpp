#include "mixdesign/common.hpp"

#include <charconv>
#include <system_error>

namespace mixdesign {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix64(parent);
  h = splitmix64(h ^ splitmix64(a + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(b + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw ComputeError("format_double: conversion failed");
  return std::string(buf, end);
}

}  // namespace mixdesign
