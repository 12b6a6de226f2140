#pragma once

#include "chor.hpp"

namespace qc {

struct Span {
  int line = 1, col = 1;
  int end_line = 1, end_col = 1;
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  Span span;
  std::string rule;  // grammar production or validation rule
  std::string message;
};
std::string diagnostic_to_string(const Diagnostic& d);

// A .chor file: a header declaring locations and their integer codes, optional
// named choreography definitions, and a main choreography with its type.
struct SourceFile {
  std::vector<Location> locations;
  LocationTable table;
  std::vector<std::pair<std::string, ChorPtr>> defs;
  CTypePtr main_type;
  ChorPtr main;
};

std::optional<SourceFile> parse_source(const std::string& text,
                                       std::vector<Diagnostic>* diags = nullptr);

// The main choreography with every def substituted in, innermost-last.
ChorPtr link_main(const SourceFile& f);

// Standalone fragment parsers. `known` lists the identifiers treated as
// concrete locations; anything else in location position is a variable.
std::optional<ChorPtr> parse_chor(const std::string& text,
                                  const std::vector<Location>& known,
                                  const LocationTable& table,
                                  std::vector<Diagnostic>* diags = nullptr);
std::optional<CTypePtr> parse_ctype(const std::string& text,
                                    const std::vector<Location>& known,
                                    std::vector<Diagnostic>* diags = nullptr);

// Pretty-printers emitting the concrete syntax. parse(print(x)) returns x
// exactly; the printers never use the element-list set sugar, so set shapes
// survive the trip.
std::string print_chor(const ChorPtr& c);
std::string print_ctype(const CTypePtr& t);
std::string print_ltype(const LTypePtr& t);
std::string print_local(const LTermPtr& e);
std::string print_rho(const LocSetPtr& s);
std::string print_source(const SourceFile& f);

}  // namespace qc
