#include "rms/normalize.hpp"

namespace rms {

namespace {

class Normalizer {
 public:
  Normalizer(const Program& program, MethodInfo& m) : program_(program), m_(m) {}

  void block(Block& b) {
    Block out;
    out.reserve(b.size());
    for (Stmt& s : b) {
      if (auto* i = s.as<IfStmt>()) {
        block(i->then_block);
        block(i->else_block);
      } else if (auto* w = s.as<WhileStmt>()) {
        block(w->body);
      } else if (auto* c = s.as<CallStmt>()) {
        if (const auto& ret = program_.method(c->call.target).return_type) {
          s.form = bind(std::move(c->call), *ret);
        }
      } else if (auto* r = s.as<ReturnStmt>(); r != nullptr && r->expr) {
        // return e;  =>  var _tN = e; return _tN;
        ClassId type = std::holds_alternative<NewExpr>(*r->expr) ? std::get<NewExpr>(*r->expr).cls
                                                                : *program_.method(std::get<CallExpr>(*r->expr).target).return_type;
        AssignStmt a = bind(std::move(*r->expr), type);
        r->expr.reset();
        r->value = Operand::var(a.var);
        out.push_back(Stmt{s.id, s.pos, std::move(a)});
      }
      out.push_back(std::move(s));
    }
    b = std::move(out);
  }

 private:
  AssignStmt bind(Rhs rhs, ClassId type) {
    AssignStmt a;
    a.var = fresh_name();
    a.declares = true;
    a.rhs = std::move(rhs);
    m_.locals[a.var] = type;
    return a;
  }

  std::string fresh_name() {
    for (;;) {
      std::string n = "_t" + std::to_string(counter_++);
      if (!m_.locals.contains(n) && !m_.param_index(n)) return n;
    }
  }

  const Program& program_;
  MethodInfo& m_;
  int counter_ = 0;
};

}  // namespace

Program normalize(Program program) {
  for (auto& m : program.methods) {
    if (!m.body) continue;
    Block body = std::move(*m.body);
    Normalizer(program, m).block(body);
    m.body = std::move(body);
  }
  renumber_statements(program);
  return program;
}

}  // namespace rms
