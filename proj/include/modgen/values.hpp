#pragma once

#include <map>
#include <string>
#include <vector>

#include "modgen/ast.hpp"

namespace modgen {

enum class ValueKind { Int, Bool, Str, Null, ObjRef };

struct Value {
  ValueKind kind = ValueKind::Null;
  long long i = 0;
  bool b = false;
  std::string s;
  int heapId = -1;

  static Value intV(long long v) {
    Value x;
    x.kind = ValueKind::Int;
    x.i = v;
    return x;
  }
  static Value boolV(bool v) {
    Value x;
    x.kind = ValueKind::Bool;
    x.b = v;
    return x;
  }
  static Value strV(std::string v) {
    Value x;
    x.kind = ValueKind::Str;
    x.s = std::move(v);
    return x;
  }
  static Value nullV() { return Value{}; }
  static Value refV(int heapId) {
    Value x;
    x.kind = ValueKind::ObjRef;
    x.heapId = heapId;
    return x;
  }

  static Value defaultFor(const Type& t) {
    switch (t.kind) {
      case TypeKind::Int: return intV(0);
      case TypeKind::Bool: return boolV(false);
      case TypeKind::Str: return strV("");
      default: return nullV();
    }
  }

  bool isNull() const { return kind == ValueKind::Null; }

  bool operator==(const Value& o) const {
    if (kind == ValueKind::Null || o.kind == ValueKind::Null)
      return kind == o.kind;
    if (kind != o.kind) return false;
    switch (kind) {
      case ValueKind::Int: return i == o.i;
      case ValueKind::Bool: return b == o.b;
      case ValueKind::Str: return s == o.s;
      case ValueKind::ObjRef: return heapId == o.heapId;
      default: return true;
    }
  }
  bool operator!=(const Value& o) const { return !(*this == o); }

  std::string str() const {
    switch (kind) {
      case ValueKind::Int: return std::to_string(i);
      case ValueKind::Bool: return b ? "true" : "false";
      case ValueKind::Str: {
        std::string out = "\"";
        for (char c : s) {
          switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c; break;
          }
        }
        out += '"';
        return out;
      }
      case ValueKind::Null: return "null";
      case ValueKind::ObjRef: return "obj#" + std::to_string(heapId);
    }
    return "?";
  }
};

struct HeapObject {
  std::string className;
  std::map<std::string, Value> fields;
};

// Per-execution object store. Ids are dense indices; objects live for the
// whole execution (no collection).
class ObjectHeap {
 public:
  int allocate(const ClassDef& cls) {
    HeapObject obj;
    obj.className = cls.name;
    for (const auto& f : cls.fields) obj.fields[f.name] = Value::defaultFor(f.type);
    objects_.push_back(std::move(obj));
    return static_cast<int>(objects_.size()) - 1;
  }

  HeapObject& at(int id) { return objects_[static_cast<size_t>(id)]; }
  const HeapObject& at(int id) const { return objects_[static_cast<size_t>(id)]; }
  int size() const { return static_cast<int>(objects_.size()); }

 private:
  std::vector<HeapObject> objects_;
};

}  // namespace modgen
