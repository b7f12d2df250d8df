#include "eventcast/service/service.hpp"

namespace eventcast::service {

namespace {

constexpr const char* kDocument = R"json({
  "openapi": "3.0.3",
  "info": {
    "title": "eventcast",
    "version": "1.0.0",
    "description": "Forecasting and what-if simulation of daily game sales and playtime driven by calendar events."
  },
  "paths": {
    "/health": {
      "get": {"summary": "Liveness probe", "responses": {"200": {"description": "ok"}}}
    },
    "/datasets": {
      "get": {
        "summary": "List uploaded datasets",
        "responses": {"200": {"description": "Dataset summaries",
          "content": {"application/json": {"schema": {"type": "array", "items": {"$ref": "#/components/schemas/Dataset"}}}}}}
      },
      "post": {
        "summary": "Upload a CSV dataset",
        "description": "JSON body {kind, name, game, target, csv, from, to}, or a text/csv body with the same fields as query parameters. Calendar and temperature uploads merge into the shared calendar. Re-uploading identical content returns the existing dataset.",
        "requestBody": {"required": true, "content": {
          "application/json": {"schema": {"$ref": "#/components/schemas/DatasetUpload"}},
          "text/csv": {"schema": {"type": "string"}}}},
        "responses": {
          "201": {"description": "Created", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Dataset"}}}},
          "200": {"description": "Already present", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Dataset"}}}},
          "400": {"$ref": "#/components/responses/Error"},
          "409": {"$ref": "#/components/responses/Error"},
          "422": {"$ref": "#/components/responses/Error"}
        }
      }
    },
    "/datasets/{id}": {
      "get": {
        "summary": "One dataset with its CSV",
        "parameters": [{"$ref": "#/components/parameters/Id"}],
        "responses": {"200": {"description": "Dataset", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Dataset"}}}},
                      "404": {"$ref": "#/components/responses/Error"}}
      }
    },
    "/calendar": {
      "get": {
        "summary": "Shared event calendar, optionally cut to [from, to]",
        "parameters": [
          {"name": "from", "in": "query", "schema": {"type": "string", "format": "date"}},
          {"name": "to", "in": "query", "schema": {"type": "string", "format": "date"}}],
        "responses": {"200": {"description": "Calendar", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Calendar"}}}},
                      "400": {"$ref": "#/components/responses/Error"}}
      }
    },
    "/train": {
      "post": {
        "summary": "Fit a model synchronously",
        "description": "Idempotent: an identical body over identical data returns the stored model with status 200.",
        "requestBody": {"required": true, "content": {"application/json": {"schema": {"$ref": "#/components/schemas/TrainRequest"}}}},
        "responses": {
          "201": {"description": "Trained", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ModelSummary"}}}},
          "200": {"description": "Already trained", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ModelSummary"}}}},
          "400": {"$ref": "#/components/responses/Error"},
          "404": {"$ref": "#/components/responses/Error"},
          "409": {"$ref": "#/components/responses/Error"},
          "422": {"$ref": "#/components/responses/Error"},
          "504": {"$ref": "#/components/responses/Error"}
        }
      }
    },
    "/models": {
      "get": {
        "summary": "List trained models",
        "responses": {"200": {"description": "Model summaries",
          "content": {"application/json": {"schema": {"type": "array", "items": {"$ref": "#/components/schemas/ModelSummary"}}}}}}
      }
    },
    "/models/{id}": {
      "get": {
        "summary": "Model record including the serialized artifact",
        "parameters": [{"$ref": "#/components/parameters/Id"}],
        "responses": {"200": {"description": "Model record", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ModelRecord"}}}},
                      "404": {"$ref": "#/components/responses/Error"}}
      },
      "delete": {
        "summary": "Delete a model",
        "parameters": [{"$ref": "#/components/parameters/Id"}],
        "responses": {"200": {"description": "Deleted", "content": {"application/json": {"schema": {"type": "object", "properties": {"deleted": {"type": "string"}}}}}},
                      "404": {"$ref": "#/components/responses/Error"}}
      }
    },
    "/forecast": {
      "post": {
        "summary": "Forecast the days after the training window",
        "requestBody": {"required": true, "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ForecastRequest"}}}},
        "responses": {
          "200": {"description": "Forecast", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ForecastResponse"}}}},
          "400": {"$ref": "#/components/responses/Error"},
          "404": {"$ref": "#/components/responses/Error"},
          "409": {"$ref": "#/components/responses/Error"},
          "422": {"$ref": "#/components/responses/Error"}
        }
      }
    },
    "/simulate": {
      "post": {
        "summary": "Compare event scenarios over the days after the training window",
        "requestBody": {"required": true, "content": {"application/json": {"schema": {"$ref": "#/components/schemas/SimulationRequest"}}}},
        "responses": {
          "200": {"description": "Scenario results", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/SimulationResponse"}}}},
          "400": {"$ref": "#/components/responses/Error"},
          "404": {"$ref": "#/components/responses/Error"},
          "422": {"$ref": "#/components/responses/Error"}
        }
      }
    },
    "/openapi.json": {
      "get": {"summary": "This document", "responses": {"200": {"description": "OpenAPI document"}}}
    }
  },
  "components": {
    "parameters": {
      "Id": {"name": "id", "in": "path", "required": true, "schema": {"type": "string"}}
    },
    "responses": {
      "Error": {"description": "Failure", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}}
    },
    "schemas": {
      "Error": {
        "type": "object", "required": ["code", "message", "field_path"],
        "properties": {
          "code": {"type": "string", "example": "InvalidArgument"},
          "message": {"type": "string"},
          "field_path": {"type": "string", "example": "baseline.events[0].scale"}}
      },
      "DatasetUpload": {
        "type": "object", "required": ["kind", "csv"],
        "properties": {
          "kind": {"type": "string", "enum": ["series", "calendar", "temperature"]},
          "name": {"type": "string"},
          "game": {"type": "string"},
          "target": {"type": "string", "enum": ["sales", "playtime"]},
          "csv": {"type": "string", "description": "series: date,value; calendar: date,event_type,subtype,scale; temperature: date,celsius"},
          "from": {"type": "string", "format": "date"},
          "to": {"type": "string", "format": "date"}}
      },
      "Dataset": {
        "type": "object",
        "properties": {
          "id": {"type": "string"}, "kind": {"type": "string"}, "name": {"type": "string"},
          "game": {"type": "string"}, "target": {"type": "string"}, "created_at": {"type": "string", "format": "date-time"},
          "from": {"type": "string", "format": "date"}, "to": {"type": "string", "format": "date"},
          "rows": {"type": "integer"}, "csv": {"type": "string"}}
      },
      "Event": {
        "type": "object", "required": ["date", "type"],
        "properties": {
          "date": {"type": "string", "format": "date"},
          "type": {"type": "string", "enum": ["game_event", "gacha", "promotion", "marketing", "holiday"]},
          "subtype": {"type": "string"},
          "scale": {"type": "integer", "minimum": 0, "maximum": 4, "description": "1..4 for gacha and promotion, absent otherwise"}}
      },
      "Calendar": {
        "type": "object",
        "properties": {
          "from": {"type": "string", "format": "date"}, "to": {"type": "string", "format": "date"},
          "vocabulary": {"type": "array", "items": {"type": "string"}},
          "events": {"type": "array", "items": {"$ref": "#/components/schemas/Event"}},
          "temperature": {"type": "object", "additionalProperties": {"type": "number"}}}
      },
      "TrainRequest": {
        "type": "object", "required": ["family", "series"],
        "properties": {
          "family": {"type": "string", "enum": ["arima", "gbm", "gam", "dbn"]},
          "series": {"type": "string", "description": "series dataset id"},
          "calendar": {"type": "string", "description": "calendar dataset id; the shared calendar when absent"},
          "game": {"type": "string"},
          "target": {"type": "string", "enum": ["sales", "playtime"]},
          "preset": {"type": "string", "enum": ["aoi_sales", "aoi_playtime", "gs_sales", "gs_playtime"]},
          "params": {"type": "object"},
          "seed": {"type": "integer", "minimum": 0},
          "encoding": {"type": "object"},
          "from": {"type": "string", "format": "date"},
          "to": {"type": "string", "format": "date"}}
      },
      "ModelSummary": {
        "type": "object",
        "properties": {
          "id": {"type": "string"}, "family": {"type": "string"}, "game": {"type": "string"},
          "target": {"type": "string"}, "trained_at": {"type": "string", "format": "date-time"},
          "params": {"type": "object"},
          "training_window": {"type": "object", "properties": {"from": {"type": "string", "format": "date"}, "to": {"type": "string", "format": "date"}}},
          "series": {"type": "string"}, "calendar_hash": {"type": "string"}}
      },
      "ModelRecord": {
        "allOf": [{"$ref": "#/components/schemas/ModelSummary"},
                  {"type": "object", "properties": {"artifact": {"type": "object"}}}]
      },
      "ForecastRequest": {
        "type": "object", "required": ["model_id", "horizon"],
        "properties": {
          "model_id": {"type": "string"},
          "horizon": {"type": "integer", "minimum": 1, "maximum": 366},
          "calendar": {"type": "string"}}
      },
      "ForecastResponse": {
        "type": "object",
        "properties": {
          "model_id": {"type": "string"},
          "dates": {"type": "array", "items": {"type": "string", "format": "date"}},
          "values": {"type": "array", "items": {"type": "number"}},
          "covariates": {"type": "object", "properties": {
            "columns": {"type": "array", "items": {"type": "string"}},
            "rows": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}}}}
      },
      "Scenario": {
        "type": "object", "required": ["name"],
        "properties": {
          "name": {"type": "string"},
          "events": {"type": "array", "items": {"$ref": "#/components/schemas/Event"}},
          "from": {"type": "string", "format": "date"},
          "to": {"type": "string", "format": "date"}}
      },
      "SimulationRequest": {
        "type": "object", "required": ["model_id", "baseline"],
        "properties": {
          "model_id": {"type": "string"},
          "origin": {"type": "string", "format": "date", "description": "must be the day after the training window"},
          "horizon": {"type": "integer", "minimum": 1, "maximum": 90, "default": 30},
          "calendar": {"type": "string"},
          "baseline": {"$ref": "#/components/schemas/Scenario"},
          "alternative": {"$ref": "#/components/schemas/Scenario"},
          "alternatives": {"type": "array", "items": {"$ref": "#/components/schemas/Scenario"}}}
      },
      "ScenarioResult": {
        "type": "object",
        "properties": {
          "name": {"type": "string"},
          "dates": {"type": "array", "items": {"type": "string", "format": "date"}},
          "values": {"type": "array", "items": {"type": "number"}},
          "transformed": {"type": "array", "items": {"type": "number"}},
          "total": {"type": "number"},
          "delta_percent": {"type": "number"}}
      },
      "SimulationResponse": {
        "type": "object",
        "properties": {
          "model_id": {"type": "string"},
          "horizon": {"type": "integer"},
          "window": {"type": "object", "properties": {"from": {"type": "string", "format": "date"}, "to": {"type": "string", "format": "date"}}},
          "baseline": {"$ref": "#/components/schemas/ScenarioResult"},
          "alternative": {"$ref": "#/components/schemas/ScenarioResult"},
          "alternatives": {"type": "array", "items": {"$ref": "#/components/schemas/ScenarioResult"}}}
      }
    }
  }
})json";

} // namespace

nlohmann::json openapi_document() {
	static const nlohmann::json doc = nlohmann::json::parse(kDocument);
	return doc;
}

} // namespace eventcast::service
