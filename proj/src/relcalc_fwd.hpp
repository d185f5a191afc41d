#pragma once

namespace mw {

// Deliberate calculus corruptions for the soundness mutation tests. Each one
// (other than WhileDropExitCond, which only weakens the derived relation)
// makes some derived formula wrong while leaving the side conditions valid,
// so the finite-domain soundness check must flag it.
enum class Mutation {
  None,
  WhileExitCondAtPre,   // exit condition left at the pre-state
  WhileDropExitCond,    // exit condition dropped from the loop relation
  AssignEmptyFrame,     // assignments claim an empty frame
  SeqSecondAtOrigin,    // second command pretends to start from the original pre-state
  IfSwapBranches,       // branch relations exchanged
  WhileDropEntryInv,    // loop precondition forgets invariant-at-entry
  WhileTermGlobalTrue,  // loop termination side condition replaced by true
};

struct DeriveOptions {
  Mutation mutation = Mutation::None;
};

}  // namespace mw
