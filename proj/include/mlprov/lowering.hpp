#ifndef MLPROV_LOWERING_HPP_
#define MLPROV_LOWERING_HPP_

#include "mlprov/ast.hpp"
#include "mlprov/wir.hpp"

namespace mlprov::wir {

// Lowers a parsed script into provenance relationships, one or more per
// operation-bearing statement, in source order. Statements containing
// declared-unsupported constructs are skipped.
PrProgram gen_prs(const py::ScriptAst &ast);

// gen_prs followed by graph composition.
Wir gen_wir(const py::ScriptAst &ast);

} // namespace mlprov::wir

#endif // MLPROV_LOWERING_HPP_
