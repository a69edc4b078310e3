#include "clarinet/melodica.hpp"

#include <stdexcept>

namespace clarinet {

namespace {

void require_arity(const MelodicaCommand& cmd, bool op1, bool op2) {
  if (cmd.operand1.has_value() != op1 || cmd.operand2.has_value() != op2)
    throw std::invalid_argument("melodica: operand arity does not match command");
}

}  // namespace

MelodicaResponse Melodica::execute(const MelodicaCommand& cmd, uint64_t now) {
  MelodicaResponse r;
  r.response_at = now;
  r.completes_at = now;

  switch (cmd.op) {
    case MelodicaOpcode::FMA_P:
    case MelodicaOpcode::FMS_P:
    case MelodicaOpcode::FDA_P:
    case MelodicaOpcode::FDS_P: {
      require_arity(cmd, true, true);
      const UnpackedPosit a = extract({*cmd.operand1, cfg_});
      const UnpackedPosit b = extract({*cmd.operand2, cfg_});
      FusedOp op;
      switch (cmd.op) {
        case MelodicaOpcode::FMA_P: op = FusedOp::MulAdd; break;
        case MelodicaOpcode::FMS_P: op = FusedOp::MulSub; break;
        case MelodicaOpcode::FDA_P: op = FusedOp::DivAdd; break;
        default: op = FusedOp::DivSub; break;
      }
      quire_.accumulate(a, b, op);
      r.completes_at = now + lat_.fused_latency();
      if (quire_busy_ < r.completes_at) quire_busy_ = r.completes_at;
      return r;  // no register-file result, pipeline proceeds at once
    }

    case MelodicaOpcode::FCVT_R_P: {
      require_arity(cmd, true, false);
      quire_.init({*cmd.operand1, cfg_});
      r.completes_at = now + lat_.fused_latency();
      if (quire_busy_ < r.completes_at) quire_busy_ = r.completes_at;
      return r;
    }

    case MelodicaOpcode::FCVT_P_R: {
      require_arity(cmd, false, false);
      // Reads drain the pipeline: every outstanding fused op must land first.
      const uint64_t start = now > quire_busy_ ? now : quire_busy_;
      r.result = (uint32_t)quire_.read_posit().pattern;
      r.response_at = start + lat_.converter_latency();
      r.completes_at = r.response_at;
      return r;
    }

    case MelodicaOpcode::FCVT_P_S: {
      require_arity(cmd, true, false);
      r.result = (uint32_t)posit_from_binary32(*cmd.operand1, cfg_).pattern;
      r.response_at = now + lat_.converter_latency();
      r.completes_at = r.response_at;
      return r;
    }

    case MelodicaOpcode::FCVT_S_P: {
      require_arity(cmd, true, false);
      r.result = binary32_from_posit({*cmd.operand1, cfg_});
      r.response_at = now + lat_.converter_latency();
      r.completes_at = r.response_at;
      return r;
    }
  }
  throw std::invalid_argument("melodica: unknown command");
}

}  // namespace clarinet
