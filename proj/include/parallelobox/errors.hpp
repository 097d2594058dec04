#pragma once

#include <stdexcept>
#include <string>

namespace parallelobox {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyMesh : public Error {
 public:
  EmptyMesh() : Error("mesh has no triangles after cleanup") {}
  explicit EmptyMesh(const std::string& what) : Error(what) {}
};

class NonWatertightInput : public Error {
 public:
  NonWatertightInput() : Error("operation requires a watertight mesh") {}
};

class DegenerateBox : public Error {
 public:
  DegenerateBox() : Error("box must have positive extent on every axis") {}
};

class InsufficientBoundaryCells : public Error {
 public:
  InsufficientBoundaryCells(int wanted, int available)
      : Error("need " + std::to_string(wanted) + " boundary cells, grid has " +
              std::to_string(available)) {}
};

class NoValidDecomposition : public Error {
 public:
  NoValidDecomposition() : Error("no metaheuristic iteration produced a valid decomposition") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace parallelobox
