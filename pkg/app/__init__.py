from app import core, schemas, services
