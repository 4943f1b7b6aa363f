#include "vtriage/vtriage.h"

#include <string>

#include "vtriage/error.hpp"
#include "vtriage/pipeline.hpp"
#include "vtriage/tagger.hpp"
#include "vtriage/textfeat.hpp"

struct vt_pipeline {
  vtriage::Pipeline pipeline;
  std::string summary;
  std::string warnings;
};

struct vt_tagger {
  explicit vt_tagger(vtriage::TaggerModel m) : model(std::move(m)) {}
  vtriage::TaggerModel model;
  std::string result;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
vt_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const vtriage::ValidationError& e) {
    g_last_error = e.what();
    return VT_ERR_VALIDATION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return VT_ERR_INTERNAL;
  }
}

vt_status bad_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return VT_ERR_ARGUMENT;
}

}  // namespace

extern "C" {

const char* vt_version(void) { return "1.0.0"; }

const char* vt_last_error(void) { return g_last_error.c_str(); }

vt_status vt_pipeline_create(vt_pipeline** out) {
  if (!out) return bad_argument("out");
  return guarded([&] {
    *out = new vt_pipeline();
    return VT_OK;
  });
}

void vt_pipeline_destroy(vt_pipeline* p) { delete p; }

vt_status vt_pipeline_load_config(vt_pipeline* p, const char* path) {
  if (!p || !path) return bad_argument("pipeline or path");
  return guarded([&] {
    p->pipeline.config().load_file(path);
    return VT_OK;
  });
}

vt_status vt_pipeline_set(vt_pipeline* p, const char* key, const char* value) {
  if (!p || !key || !value) return bad_argument("pipeline, key or value");
  return guarded([&] {
    p->pipeline.config().set(key, value);
    return VT_OK;
  });
}

vt_status vt_pipeline_set_option(vt_pipeline* p, const char* key, const char* value) {
  if (!p || !key || !value) return bad_argument("pipeline, key or value");
  p->pipeline.set_option(key, value);
  return VT_OK;
}

vt_status vt_pipeline_clear_options(vt_pipeline* p) {
  if (!p) return bad_argument("pipeline");
  p->pipeline.clear_options();
  return VT_OK;
}

int vt_is_command(const char* command) { return command && vtriage::Pipeline::is_command(command) ? 1 : 0; }

vt_status vt_pipeline_run(vt_pipeline* p, const char* command, const char** summary) {
  if (!p || !command) return bad_argument("pipeline or command");
  if (!vtriage::Pipeline::is_command(command)) {
    g_last_error = std::string("unknown command '") + command + "'";
    return VT_ERR_UNKNOWN_COMMAND;
  }
  const vt_status st = guarded([&] {
    p->summary = p->pipeline.run(command);
    return VT_OK;
  });
  p->warnings.clear();
  for (const auto& w : p->pipeline.warnings()) p->warnings += (p->warnings.empty() ? "" : "\n") + w;
  if (st == VT_OK && summary) *summary = p->summary.c_str();
  return st;
}

const char* vt_pipeline_warnings(const vt_pipeline* p) { return p ? p->warnings.c_str() : ""; }

vt_status vt_tagger_load(const char* path, vt_tagger** out) {
  if (!path || !out) return bad_argument("path or out");
  return guarded([&] {
    *out = new vt_tagger(vtriage::TaggerModel::load(path));
    return VT_OK;
  });
}

void vt_tagger_destroy(vt_tagger* t) { delete t; }

vt_status vt_tagger_tag(vt_tagger* t, const char* text, const char** result) {
  if (!t || !text || !result) return bad_argument("tagger, text or result");
  return guarded([&] {
    std::string out;
    for (const auto& sentence : vtriage::tokenize(text).sentence_tokens()) {
      const auto tags = t->model.tag(sentence);
      for (std::size_t i = 0; i < sentence.size(); ++i)
        out += sentence[i] + '\t' + std::string(vtriage::to_string(tags[i])) + '\n';
      out += '\n';
    }
    t->result = std::move(out);
    *result = t->result.c_str();
    return VT_OK;
  });
}

vt_status vt_readability(const char* text, double* grade, int* defined) {
  if (!text || !grade || !defined) return bad_argument("text, grade or defined");
  return guarded([&] {
    const auto tok = vtriage::tokenize(text);
    *defined = tok.tokens.empty() ? 0 : 1;
    *grade = tok.tokens.empty() ? 0.0 : vtriage::readability(tok);
    return VT_OK;
  });
}

}  // extern "C"
