#pragma once

#include <filesystem>
#include <string>

#include "m3s/types.hpp"

namespace m3s {

enum class DataFormat { Csv, Json };

/// Shortest round-trip decimal form of a double; all CSV writers use this so
/// files are lossless and byte-stable.
std::string format_double(double value);

/// Infers Csv/Json from the file extension; defaults to Csv.
DataFormat format_from_path(const std::filesystem::path& path);

/// Loads a dataset file.
///
/// CSV schema: header `id,label,pci,eh,dm,aci,sm,v0,...,v1023`; label in
/// {AMI,CAD,AF,CON,NA}; flags in {0,1}. JSON schema: array of objects
/// {id, label, history:[5 ints], values:[1024 floats]}.
///
/// Throws ParseError (with the offending row) on malformed cells and
/// SchemaError on wrong column counts / sequence lengths. Row order is
/// preserved.
Dataset load_dataset(const std::filesystem::path& path, DataFormat format);
Dataset load_dataset(const std::filesystem::path& path);

/// Writes a dataset in the schema `load_dataset` reads. Float cells use
/// shortest round-trip formatting, so save/load is lossless and a fixed
/// dataset always serializes to identical bytes.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path,
                  DataFormat format);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace m3s
