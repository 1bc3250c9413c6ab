// Copyright 2026 The Graphfuzz Authors
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

#include "graphfuzz/ir_text.h"

#include <cctype>
#include <optional>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "graphfuzz/status_macros.h"

namespace graphfuzz {
namespace {

void Indent(int n, std::string& out) { out.append(n, ' '); }

void PrintParams(const std::vector<Param>& params, std::string& out) {
  out += "(";
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    absl::StrAppend(&out, "%", params[i].name, ": ", PrintType(params[i].type));
  }
  out += ")";
}

void Print(const ExprPtr& e, int indent, bool tail, std::string& out);

// Prints `e` where only a postfix-able expression may appear.
void PrintOperand(const ExprPtr& e, int indent, std::string& out) {
  if (e->kind == ExprKind::kLet) {
    out += "(";
    Print(e, indent, /*tail=*/false, out);
    out += ")";
    return;
  }
  Print(e, indent, /*tail=*/false, out);
}

void PrintList(const std::vector<ExprPtr>& items, int indent,
               std::string& out) {
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    PrintOperand(items[i], indent, out);
  }
}

void Print(const ExprPtr& e, int indent, bool tail, std::string& out) {
  switch (e->kind) {
    case ExprKind::kVar:
      absl::StrAppend(&out, "%", e->name);
      return;
    case ExprKind::kFuncRef:
      absl::StrAppend(&out, "@", e->name);
      return;
    case ExprKind::kConst:
      absl::StrAppend(&out, "const<", DTypeName(e->value->dtype()), ",",
                      e->value->shape().ToString(), ">",
                      e->value->DataString());
      return;
    case ExprKind::kPrim:
      absl::StrAppend(&out, OpName(e->op), "(");
      PrintList(e->args, indent, out);
      out += ")";
      return;
    case ExprKind::kCall:
      PrintOperand(e->lhs, indent, out);
      out += "(";
      PrintList(e->args, indent, out);
      out += ")";
      return;
    case ExprKind::kTuple:
      out += "(";
      PrintList(e->args, indent, out);
      if (e->args.size() == 1) out += ",";
      out += ")";
      return;
    case ExprKind::kTupleGet:
      PrintOperand(e->lhs, indent, out);
      absl::StrAppend(&out, ".", e->index);
      return;
    case ExprKind::kClosure:
      out += "fn";
      PrintParams(e->params, out);
      out += " {\n";
      Indent(indent + 2, out);
      Print(e->body, indent + 2, /*tail=*/true, out);
      out += "\n";
      Indent(indent, out);
      out += "}";
      return;
    case ExprKind::kLet: {
      // A let in operand position opens its own indented block.
      int inner = tail ? indent : indent + 2;
      if (!tail) {
        out += "\n";
        Indent(inner, out);
      }
      ExprPtr cur = e;
      while (cur->kind == ExprKind::kLet) {
        absl::StrAppend(&out, "let %", cur->name, " = ");
        PrintOperand(cur->lhs, inner, out);
        out += ";\n";
        Indent(inner, out);
        cur = cur->body;
      }
      Print(cur, inner, /*tail=*/true, out);
      if (!tail) {
        out += "\n";
        Indent(indent, out);
      }
      return;
    }
  }
}

}  // namespace

std::string PrintType(const IrTypePtr& type) {
  if (!type) return "?";
  return type->ToString();
}

std::string PrintExpr(const ExprPtr& e) {
  std::string out;
  Print(e, 0, /*tail=*/true, out);
  return out;
}

std::string PrintModule(const IrModule& m) {
  std::string out;
  for (size_t i = 0; i < m.functions.size(); ++i) {
    const GlobalFunction& f = m.functions[i];
    if (i) out += "\n";
    absl::StrAppend(&out, "def @", f.name);
    PrintParams(f.params, out);
    out += " {\n  ";
    Print(f.body, 2, /*tail=*/true, out);
    out += "\n}\n";
  }
  return out;
}

namespace {

bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
 public:
  explicit Parser(absl::string_view text) : text_(text) {}

  absl::StatusOr<IrModule> Module() {
    IrModule m;
    SkipSpace();
    while (!AtEnd()) {
      GlobalFunction f;
      if (!ConsumeWord("def")) return Error("expected 'def'");
      GF_ASSIGN_OR_RETURN(f.name, Name('@'));
      GF_ASSIGN_OR_RETURN(f.params, Params());
      if (!Consume('{')) return Error("expected '{'");
      GF_ASSIGN_OR_RETURN(f.body, Expression());
      if (!Consume('}')) return Error("expected '}'");
      if (m.Find(f.name)) return Error(absl::StrCat("duplicate global @", f.name));
      m.functions.push_back(std::move(f));
      SkipSpace();
    }
    return m;
  }

  absl::StatusOr<ExprPtr> WholeExpr() {
    GF_ASSIGN_OR_RETURN(ExprPtr e, Expression());
    SkipSpace();
    if (!AtEnd()) return Error("trailing text");
    return e;
  }

  absl::StatusOr<IrTypePtr> WholeType() {
    GF_ASSIGN_OR_RETURN(IrTypePtr t, Type());
    SkipSpace();
    if (!AtEnd()) return Error("trailing text");
    return t;
  }

 private:
  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return AtEnd() ? '\0' : text_[pos_]; }

  void SkipSpace() {
    while (!AtEnd() && std::isspace(static_cast<unsigned char>(Peek()))) ++pos_;
  }

  bool Consume(char c) {
    SkipSpace();
    if (Peek() != c) return false;
    ++pos_;
    return true;
  }

  bool ConsumeText(absl::string_view t) {
    SkipSpace();
    if (text_.substr(pos_, t.size()) != t) return false;
    pos_ += t.size();
    return true;
  }

  // Consumes `w` only when it is a whole identifier.
  bool ConsumeWord(absl::string_view w) {
    SkipSpace();
    if (text_.substr(pos_, w.size()) != w) return false;
    if (pos_ + w.size() < text_.size() && IsIdentChar(text_[pos_ + w.size()])) {
      return false;
    }
    pos_ += w.size();
    return true;
  }

  absl::string_view Ident() {
    SkipSpace();
    size_t start = pos_;
    while (!AtEnd() && IsIdentChar(Peek())) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  absl::StatusOr<std::string> Name(char sigil) {
    if (!Consume(sigil)) return Error(absl::StrCat("expected '", std::string(1, sigil), "'"));
    absl::string_view id = Ident();
    if (id.empty()) return Error("expected identifier");
    return std::string(id);
  }

  absl::Status Error(absl::string_view msg) const {
    int line = 1, col = 1;
    for (size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return absl::InvalidArgumentError(
        absl::StrCat("ERROR ParseError at line ", line, " column ", col, ": ", msg));
  }

  absl::StatusOr<std::vector<Param>> Params() {
    std::vector<Param> params;
    if (!Consume('(')) return Error("expected '('");
    if (Consume(')')) return params;
    do {
      Param p;
      GF_ASSIGN_OR_RETURN(p.name, Name('%'));
      if (!Consume(':')) return Error("expected ':'");
      GF_ASSIGN_OR_RETURN(p.type, Type());
      params.push_back(std::move(p));
    } while (Consume(','));
    if (!Consume(')')) return Error("expected ')'");
    return params;
  }

  absl::StatusOr<IrTypePtr> Type() {
    if (ConsumeWord("Tensor")) {
      if (!Consume('[')) return Error("expected '['");
      absl::string_view dname = Ident();
      std::optional<DType> d = ParseDType(dname);
      if (!d) return Error(absl::StrCat("unknown dtype '", dname, "'"));
      if (!Consume(',')) return Error("expected ','");
      GF_ASSIGN_OR_RETURN(Shape shape, ShapeLiteral());
      if (!Consume(']')) return Error("expected ']'");
      return TensorTy(TensorType{*d, std::move(shape)});
    }
    if (ConsumeWord("fn")) {
      GF_ASSIGN_OR_RETURN(std::vector<IrTypePtr> params, TypeList());
      if (!ConsumeText("->")) return Error("expected '->'");
      GF_ASSIGN_OR_RETURN(IrTypePtr result, Type());
      return FuncTy(std::move(params), std::move(result));
    }
    SkipSpace();
    if (Peek() == '(') {
      GF_ASSIGN_OR_RETURN(std::vector<IrTypePtr> fields, TypeList());
      return TupleTy(std::move(fields));
    }
    return Error("expected type");
  }

  // "(T, T)" with an optional trailing comma.
  absl::StatusOr<std::vector<IrTypePtr>> TypeList() {
    std::vector<IrTypePtr> out;
    if (!Consume('(')) return Error("expected '('");
    while (!Consume(')')) {
      GF_ASSIGN_OR_RETURN(IrTypePtr t, Type());
      out.push_back(std::move(t));
      if (!Consume(',')) {
        if (!Consume(')')) return Error("expected ',' or ')'");
        break;
      }
    }
    return out;
  }

  absl::StatusOr<Shape> ShapeLiteral() {
    SkipSpace();
    size_t start = pos_;
    size_t end = text_.find(')', pos_);
    if (Peek() != '(' || end == absl::string_view::npos) {
      return Error("expected shape");
    }
    pos_ = end + 1;
    absl::StatusOr<Shape> shape = ParseShape(text_.substr(start, end + 1 - start));
    if (!shape.ok()) return Error(shape.status().message());
    return shape;
  }

  absl::StatusOr<ExprPtr> Expression() {
    if (ConsumeWord("let")) {
      GF_ASSIGN_OR_RETURN(std::string name, Name('%'));
      if (!Consume('=')) return Error("expected '='");
      GF_ASSIGN_OR_RETURN(ExprPtr value, Expression());
      if (!Consume(';')) return Error("expected ';'");
      GF_ASSIGN_OR_RETURN(ExprPtr body, Expression());
      return MakeLet(std::move(name), std::move(value), std::move(body));
    }
    GF_ASSIGN_OR_RETURN(ExprPtr e, Primary());
    while (true) {
      SkipSpace();
      if (Peek() == '(') {
        GF_ASSIGN_OR_RETURN(std::vector<ExprPtr> args, ArgList());
        e = MakeCall(std::move(e), std::move(args));
      } else if (Peek() == '.') {
        ++pos_;
        absl::string_view digits = Ident();
        int index = 0;
        if (digits.empty()) return Error("expected tuple index");
        for (char c : digits) {
          if (!std::isdigit(static_cast<unsigned char>(c))) {
            return Error("expected tuple index");
          }
          index = index * 10 + (c - '0');
        }
        e = MakeTupleGet(std::move(e), index);
      } else {
        return e;
      }
    }
  }

  absl::StatusOr<std::vector<ExprPtr>> ArgList() {
    std::vector<ExprPtr> args;
    if (!Consume('(')) return Error("expected '('");
    if (Consume(')')) return args;
    do {
      GF_ASSIGN_OR_RETURN(ExprPtr a, Expression());
      args.push_back(std::move(a));
    } while (Consume(','));
    if (!Consume(')')) return Error("expected ',' or ')'");
    return args;
  }

  absl::StatusOr<ExprPtr> Primary() {
    SkipSpace();
    char c = Peek();
    if (c == '%') {
      GF_ASSIGN_OR_RETURN(std::string name, Name('%'));
      return MakeVar(std::move(name));
    }
    if (c == '@') {
      GF_ASSIGN_OR_RETURN(std::string name, Name('@'));
      return MakeFuncRef(std::move(name));
    }
    if (c == '(') {
      ++pos_;
      if (Consume(')')) return MakeTuple({});
      GF_ASSIGN_OR_RETURN(ExprPtr first, Expression());
      if (Consume(')')) return first;
      if (!Consume(',')) return Error("expected ',' or ')'");
      std::vector<ExprPtr> fields = {std::move(first)};
      while (!Consume(')')) {
        GF_ASSIGN_OR_RETURN(ExprPtr f, Expression());
        fields.push_back(std::move(f));
        if (!Consume(',')) {
          if (!Consume(')')) return Error("expected ',' or ')'");
          break;
        }
      }
      return MakeTuple(std::move(fields));
    }
    if (ConsumeWord("fn")) {
      GF_ASSIGN_OR_RETURN(std::vector<Param> params, Params());
      if (!Consume('{')) return Error("expected '{'");
      GF_ASSIGN_OR_RETURN(ExprPtr body, Expression());
      if (!Consume('}')) return Error("expected '}'");
      return MakeClosure(std::move(params), std::move(body));
    }
    if (ConsumeWord("const")) return ConstLiteral();
    size_t start = pos_;
    absl::string_view id = Ident();
    if (id.empty()) return Error("expected expression");
    absl::StatusOr<const OperatorSpec*> spec = LookupOperator(id);
    if (!spec.ok()) {
      pos_ = start;
      return Error(absl::StrCat("unknown operator '", id, "'"));
    }
    GF_ASSIGN_OR_RETURN(std::vector<ExprPtr> args, ArgList());
    return MakePrim((*spec)->code, std::move(args));
  }

  absl::StatusOr<ExprPtr> ConstLiteral() {
    if (!Consume('<')) return Error("expected '<'");
    absl::string_view dname = Ident();
    std::optional<DType> d = ParseDType(dname);
    if (!d) return Error(absl::StrCat("unknown dtype '", dname, "'"));
    if (!Consume(',')) return Error("expected ','");
    GF_ASSIGN_OR_RETURN(Shape shape, ShapeLiteral());
    if (!Consume('>')) return Error("expected '>'");
    SkipSpace();
    size_t start = pos_;
    size_t end = text_.find(']', pos_);
    if (Peek() != '[' || end == absl::string_view::npos) {
      return Error("expected tensor data");
    }
    pos_ = end + 1;
    absl::StatusOr<TensorValue> value =
        ParseTensorData(*d, shape, text_.substr(start, end + 1 - start));
    if (!value.ok()) return Error(value.status().message());
    return MakeConst(*std::move(value));
  }

  absl::string_view text_;
  size_t pos_ = 0;
};

}  // namespace

absl::StatusOr<IrModule> ParseModule(absl::string_view text) {
  return Parser(text).Module();
}

absl::StatusOr<ExprPtr> ParseExpr(absl::string_view text) {
  return Parser(text).WholeExpr();
}

absl::StatusOr<IrTypePtr> ParseType(absl::string_view text) {
  return Parser(text).WholeType();
}

}  // namespace graphfuzz
