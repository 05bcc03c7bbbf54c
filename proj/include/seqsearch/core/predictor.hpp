#pragma once

#include <any>
#include <memory>
#include <string>
#include <typeinfo>
#include <utility>

#include "seqsearch/core/error.hpp"
#include "seqsearch/core/types.hpp"

namespace seqsearch {

/// Opaque, copyable snapshot of a predictor's internal state. Copies are
/// deep: restoring a snapshot never aliases the live predictor.
class PredictorState {
 public:
  PredictorState() = default;

  template <typename T>
  static PredictorState of(T payload) {
    PredictorState s;
    s.payload_ = std::move(payload);
    return s;
  }

  template <typename T>
  const T& as(const std::string& owner) const {
    const T* p = std::any_cast<T>(&payload_);
    if (p == nullptr) {
      throw StateMismatchError(owner + ": state snapshot belongs to another predictor type");
    }
    return *p;
  }

  bool empty() const { return !payload_.has_value(); }

 private:
  std::any payload_;
};

/// A scoring module with left-to-right semantics.
///
/// The public methods enforce the call protocol (initialize first) and
/// forward to the protected do_* hooks that concrete predictors implement.
class Predictor {
 public:
  virtual ~Predictor() = default;

  void initialize(const SourceSentence& src) {
    do_initialize(src);
    initialized_ = true;
  }

  PredictorState get_state() const {
    require_initialized("get_state");
    return do_get_state();
  }

  void set_state(const PredictorState& state) {
    require_initialized("set_state");
    do_set_state(state);
  }

  Posterior predict_next() {
    require_initialized("predict_next");
    return do_predict_next();
  }

  void consume(TokenId token) {
    require_initialized("consume");
    do_consume(token);
  }

  bool initialized() const { return initialized_; }

  virtual std::string name() const = 0;

 protected:
  virtual void do_initialize(const SourceSentence& src) = 0;
  virtual PredictorState do_get_state() const = 0;
  virtual void do_set_state(const PredictorState& state) = 0;
  virtual Posterior do_predict_next() = 0;
  virtual void do_consume(TokenId token) = 0;

 private:
  void require_initialized(const char* method) const {
    if (!initialized_) {
      throw UsageError(name() + "::" + method + " called before initialize");
    }
  }

  bool initialized_ = false;
};

/// A predictor paired with its weight in the linear model.
struct PredictorSlot {
  std::shared_ptr<Predictor> predictor;
  double weight = 1.0;
};

}  // namespace seqsearch
