// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/mrbnn.h"

#include "mrbnn/commands.hpp"
#include "mrbnn/errors.hpp"
#include "mrbnn/model_io.hpp"
#include "mrbnn/photonics.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct mrbnn_context {
    mrbnn::ToolkitConfig config;
};

struct mrbnn_model {
    mrbnn::ModelFile file;
};

namespace {

thread_local std::string g_last_error;

mrbnn_status fail(mrbnn_status code, const char* what) {
    g_last_error = what;
    return code;
}

template <class F>
mrbnn_status guarded(F&& f) {
    try {
        f();
        return MRBNN_OK;
    } catch (const mrbnn::ConfigError& e) {
        return fail(MRBNN_ERR_USAGE, e.what());
    } catch (const mrbnn::DataError& e) {
        return fail(MRBNN_ERR_DATA, e.what());
    } catch (const mrbnn::PhysicalConstraintError& e) {
        return fail(MRBNN_ERR_PHYSICAL, e.what());
    } catch (const mrbnn::DomainError& e) {
        return fail(MRBNN_ERR_USAGE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MRBNN_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MRBNN_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MRBNN_ERR_INTERNAL, "unknown error");
    }
}

void fill(mrbnn_buffer* out, const std::string& s) {
    if (!out) return;
    auto* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.data(), s.size());
    p[s.size()] = '\0';
    out->data = p;
    out->size = s.size();
}

void emit(const mrbnn::cmd::Output& o, mrbnn_buffer* primary, mrbnn_buffer* summary) {
    fill(primary, o.primary);
    try {
        fill(summary, o.summary);
    } catch (...) {
        mrbnn_buffer_free(primary);
        throw;
    }
}

void need(const void* p, const char* name) {
    if (!p) throw mrbnn::ConfigError(std::string(name) + " must not be NULL");
}

std::string str(const char* s) { return s ? std::string(s) : std::string(); }

} // namespace

extern "C" {

const char* mrbnn_version(void) { return "0.1.0"; }

const char* mrbnn_last_error(void) { return g_last_error.c_str(); }

void mrbnn_buffer_free(mrbnn_buffer* buffer) {
    if (!buffer) return;
    std::free(buffer->data);
    buffer->data = nullptr;
    buffer->size = 0;
}

mrbnn_status mrbnn_context_create(const char* config_path, mrbnn_context** out) {
    return guarded([&] {
        need(out, "out");
        *out = new mrbnn_context{mrbnn::resolve_config(str(config_path))};
    });
}

mrbnn_status mrbnn_context_from_json(const char* json_text, mrbnn_context** out) {
    return guarded([&] {
        need(json_text, "json_text");
        need(out, "out");
        *out = new mrbnn_context{mrbnn::parse_config(json_text)};
    });
}

void mrbnn_context_destroy(mrbnn_context* ctx) { delete ctx; }

mrbnn_status mrbnn_context_config_json(const mrbnn_context* ctx, mrbnn_buffer* out) {
    return guarded([&] {
        need(ctx, "ctx");
        fill(out, mrbnn::serialize_config(ctx->config));
    });
}

mrbnn_status mrbnn_device_report(const mrbnn_context* ctx, const char* ring_class, mrbnn_buffer* primary,
                                 mrbnn_buffer* summary) {
    return guarded([&] {
        need(ctx, "ctx");
        need(ring_class, "ring_class");
        emit(mrbnn::cmd::device_report(ctx->config, ring_class), primary, summary);
    });
}

mrbnn_status mrbnn_fpv_sweep(const mrbnn_context* ctx, const char* model_path, const char* fractions, size_t maps,
                             mrbnn_buffer* primary, mrbnn_buffer* summary) {
    return guarded([&] {
        need(ctx, "ctx");
        need(model_path, "model_path");
        const auto f = mrbnn::cmd::parse_fractions(str(fractions));
        const std::size_t n = maps == 0 ? ctx->config.experiment.fpv_maps : maps;
        emit(mrbnn::cmd::fpv_sweep(ctx->config, model_path, f, n), primary, summary);
    });
}

mrbnn_status mrbnn_simulate(const mrbnn_context* ctx, const char* model_path, int has_parameters, uint64_t parameters,
                            const char* arch, mrbnn_buffer* primary, mrbnn_buffer* summary) {
    return guarded([&] {
        need(ctx, "ctx");
        std::optional<std::uint64_t> p;
        if (has_parameters) p = parameters;
        emit(mrbnn::cmd::simulate(ctx->config, str(model_path), p, str(arch)), primary, summary);
    });
}

mrbnn_status mrbnn_dse(const mrbnn_context* ctx, mrbnn_buffer* primary, mrbnn_buffer* summary) {
    return guarded([&] {
        need(ctx, "ctx");
        emit(mrbnn::cmd::dse(ctx->config), primary, summary);
    });
}

mrbnn_status mrbnn_train_toy(const mrbnn_context* ctx, int has_dataset_seed, uint64_t dataset_seed,
                             mrbnn_buffer* primary, mrbnn_buffer* summary) {
    return guarded([&] {
        need(ctx, "ctx");
        const std::uint64_t seed = has_dataset_seed ? dataset_seed : ctx->config.experiment.dataset.seed;
        emit(mrbnn::cmd::train_toy(ctx->config, seed), primary, summary);
    });
}

mrbnn_status mrbnn_model_load(const char* path, mrbnn_model** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new mrbnn_model{mrbnn::load_model(path)};
    });
}

void mrbnn_model_destroy(mrbnn_model* model) { delete model; }

mrbnn_status mrbnn_model_parameter_count(const mrbnn_model* model, uint64_t* out) {
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        *out = model->file.model.parameter_count();
    });
}

mrbnn_status mrbnn_model_metadata(const mrbnn_model* model, mrbnn_buffer* out) {
    return guarded([&] {
        need(model, "model");
        fill(out, model->file.metadata_json);
    });
}

mrbnn_status mrbnn_allpass_transmission(double r, double a, double phase_rad, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = mrbnn::allpass_transmission(r, a, phase_rad);
    });
}

mrbnn_status mrbnn_fwhm_from_q(double wavelength_nm, double q_factor, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = mrbnn::fwhm_from_q(wavelength_nm, q_factor);
    });
}

mrbnn_status mrbnn_crosstalk_phi(double lambda_i_nm, double lambda_j_nm, double q_factor, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = mrbnn::crosstalk_phi(lambda_i_nm, lambda_j_nm, q_factor);
    });
}

} // extern "C"
